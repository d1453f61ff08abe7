#include <doctest.h>

#include <algorithm>

#include "plane_oracle.hpp"
#include "realseal/geometry.hpp"
#include "realseal/rng.hpp"

using namespace realseal;
using namespace realseal::geometry;

namespace {

Mat3 random_rotation(Rng& rng) {
    Vec3 axis{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    while (axis.norm() < 1e-6) axis = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
    return Mat3::rotation(axis, rng.uniform(0, 6.28318530717958647692));
}

PinholeCamera random_camera(Rng& rng) {
    PinholeCamera cam;
    cam.focal_px = rng.uniform(100, 1500);
    cam.cx = rng.uniform(-50, 50);
    cam.cy = rng.uniform(-50, 50);
    cam.rotation = random_rotation(rng);
    cam.translation = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    return cam;
}

}  // namespace

TEST_CASE("project follows the pinhole equations") {
    PinholeCamera cam;  // f=1, pp=(0,0), identity pose
    auto on_axis = project({0, 0, 5}, cam);
    REQUIRE(on_axis.ok());
    CHECK(on_axis.value().u == doctest::Approx(0).epsilon(1e-12));
    CHECK(on_axis.value().v == doctest::Approx(0).epsilon(1e-12));

    auto off_axis = project({1, 0, 5}, cam);
    REQUIRE(off_axis.ok());
    CHECK(off_axis.value().u == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(off_axis.value().v == doctest::Approx(0).epsilon(1e-12));

    // Camera center translated to (1, 0, 0).
    PinholeCamera shifted = cam;
    shifted.translation = {-1, 0, 0};
    auto seen = project({0, 0, 5}, shifted);
    REQUIRE(seen.ok());
    CHECK(seen.value().u == doctest::Approx(-0.2).epsilon(1e-12));

    auto behind = project({0, 0, -1}, cam);
    REQUIRE_FALSE(behind.ok());
    CHECK(behind.error().kind == GeometryErrorKind::BehindCamera);
    auto at_plane = project({0, 0, 0}, cam);
    REQUIRE_FALSE(at_plane.ok());
}

TEST_CASE("camera validation rejects non-rotations") {
    PinholeCamera cam;
    cam.rotation.m[0][0] = 1.5;
    CHECK_FALSE(cam.valid());
    auto rejected = project({0, 0, 5}, cam);
    REQUIRE_FALSE(rejected.ok());
    CHECK(rejected.error().kind == GeometryErrorKind::InvalidCamera);

    // Reflections (det = -1) are not rotations.
    PinholeCamera mirror;
    mirror.rotation.m[0][0] = -1;
    CHECK_FALSE(mirror.valid());
}

TEST_CASE("triangulate inverts the textbook stereo example") {
    CameraRig rig = make_stereo_rig(1.0, 1.0);
    auto point = triangulate({{0, 0}, {-0.2, 0}}, rig);
    REQUIRE(point.ok());
    CHECK(std::abs(point.value().x - 0) < 1e-9);
    CHECK(std::abs(point.value().y - 0) < 1e-9);
    CHECK(std::abs(point.value().z - 5) < 1e-9);
}

TEST_CASE("triangulate rejects parallel rays") {
    CameraRig rig = make_stereo_rig(1.0, 1.0);
    auto degenerate = triangulate({{0.3, 0.1}, {0.3, 0.1}}, rig);
    REQUIRE_FALSE(degenerate.ok());
    CHECK(degenerate.error().kind == GeometryErrorKind::DegenerateRays);
}

TEST_CASE("triangulate(project(p)) recovers random points exactly") {
    Rng rng(101);
    int done = 0;
    while (done < 2000) {
        CameraRig rig;
        rig.cam_a = random_camera(rng);
        rig.cam_b = random_camera(rng);
        if (!rig.valid()) continue;
        // A point well in front of camera A.
        Vec3 in_cam{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(2, 8)};
        Vec3 point = rig.cam_a.rotation.transposed() * (in_cam - rig.cam_a.translation);
        auto pa = project(point, rig.cam_a);
        auto pb = project(point, rig.cam_b);
        if (!pa.ok() || !pb.ok()) continue;
        auto back = triangulate({pa.value(), pb.value()}, rig, 2e-3);
        if (!back.ok()) continue;  // near-parallel draw; skip
        CHECK((back.value() - point).norm() <= 1e-9);
        ++done;
    }
}

TEST_CASE("fit_plane on exactly coplanar points is exact") {
    std::vector<Vec3> square{{0, 0, 5}, {1, 0, 5}, {0, 1, 5}, {1, 1, 5}};
    auto fit = fit_plane(square);
    REQUIRE(fit.ok());
    CHECK(std::abs(std::abs(fit.value().normal.z) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(fit.value().offset) - 5.0) < 1e-12);
    CHECK(fit.value().rms_residual <= 1e-12);
}

TEST_CASE("fit_plane matches the brute-force oracle on the tilted fixture") {
    std::vector<Vec3> points{{0, 0, 4}, {1, 0, 6}, {0, 1, 4}, {1, 1, 6}, {0.5, 0.5, 5}};
    auto fit = fit_plane(points);
    REQUIRE(fit.ok());
    CHECK(fit.value().rms_residual > 0);
    auto oracle = test_oracle::brute_force_plane(points);
    CHECK(std::abs(fit.value().rms_residual - oracle.rms) <= 1e-9);
    CHECK(std::abs(fit.value().normal.dot(oracle.normal)) > 1.0 - 1e-5);
}

TEST_CASE("fit_plane matches the oracle on random clouds") {
    Rng rng(103);
    for (int iter = 0; iter < 25; ++iter) {
        std::vector<Vec3> points;
        int n = 10 + static_cast<int>(rng.next_u64() % 40);
        for (int i = 0; i < n; ++i) {
            points.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.gaussian(5.0, 0.6)});
        }
        auto fit = fit_plane(points);
        REQUIRE(fit.ok());
        auto oracle = test_oracle::brute_force_plane(points);
        CHECK(std::abs(fit.value().rms_residual - oracle.rms) <= 1e-9);
    }
}

TEST_CASE("fit_plane rejects degenerate input") {
    auto two = fit_plane(std::vector<Vec3>{{0, 0, 0}, {1, 1, 1}});
    REQUIRE_FALSE(two.ok());
    CHECK(two.error().kind == GeometryErrorKind::DegeneratePoints);

    std::vector<Vec3> line;
    for (int i = 0; i < 10; ++i) line.push_back({i * 0.5, i * 1.0, i * -0.25});
    auto collinear = fit_plane(line);
    REQUIRE_FALSE(collinear.ok());
    CHECK(collinear.error().kind == GeometryErrorKind::DegeneratePoints);
}

namespace {

CorrespondenceSet project_scene(const std::vector<Vec3>& points, const CameraRig& rig,
                                double noise_sigma, Rng& rng) {
    CorrespondenceSet pairs;
    for (const Vec3& p : points) {
        auto a = project(p, rig.cam_a);
        auto b = project(p, rig.cam_b);
        REQUIRE(a.ok());
        REQUIRE(b.ok());
        PixelPair pair{a.value(), b.value()};
        if (noise_sigma > 0) {
            pair.a.u += rng.gaussian(0, noise_sigma);
            pair.a.v += rng.gaussian(0, noise_sigma);
            pair.b.u += rng.gaussian(0, noise_sigma);
            pair.b.v += rng.gaussian(0, noise_sigma);
        }
        pairs.push_back(pair);
    }
    return pairs;
}

}  // namespace

TEST_CASE("classify_scene labels a flat board 2D with near-zero score") {
    CameraRig rig = make_stereo_rig(500.0, 1.0);
    Rng rng(107);
    std::vector<Vec3> board;
    for (int i = 0; i < 32; ++i) {
        board.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), 5.0});
    }
    CorrespondenceSet pairs = project_scene(board, rig, 0.0, rng);
    auto report = classify_scene(pairs, rig, 0.005);
    REQUIRE(report.ok());
    CHECK(report.value().label == SceneLabel::Label2D);
    CHECK(report.value().normalized_score <= 1e-9);
}

TEST_CASE("classify_scene labels a volumetric cloud 3D, score matching the oracle") {
    CameraRig rig = make_stereo_rig(500.0, 1.0);
    Rng rng(109);
    std::vector<Vec3> cloud;
    for (int i = 0; i < 256; ++i) {
        cloud.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(4, 6)});
    }
    CorrespondenceSet pairs = project_scene(cloud, rig, 0.0, rng);
    auto report = classify_scene(pairs, rig, 0.005);
    REQUIRE(report.ok());
    CHECK(report.value().label == SceneLabel::Label3D);

    // Independent route: brute-force plane fit over the source points divided
    // by their mean depth. Depths uniform in [4,6] put the score near
    // 0.577/5 = 0.115.
    auto oracle = test_oracle::brute_force_plane(cloud);
    double mean_depth = 0;
    for (const Vec3& p : cloud) mean_depth += p.z;
    mean_depth /= static_cast<double>(cloud.size());
    double oracle_score = oracle.rms / mean_depth;
    CHECK(std::abs(report.value().normalized_score - oracle_score) <= 1e-9);
    CHECK(oracle_score == doctest::Approx(0.115).epsilon(0.15));
}

TEST_CASE("classify_scene needs at least four triangulated pairs") {
    CameraRig rig = make_stereo_rig(500.0, 1.0);
    Rng rng(113);
    std::vector<Vec3> three{{0, 0, 5}, {0.5, 0.2, 5.5}, {-0.3, 0.4, 4.5}};
    CorrespondenceSet pairs = project_scene(three, rig, 0.0, rng);
    auto report = classify_scene(pairs, rig, 0.005);
    REQUIRE_FALSE(report.ok());
    CHECK(report.error().kind == GeometryErrorKind::InsufficientGeometry);
}

TEST_CASE("normalized score is scale invariant") {
    Rng rng(127);
    std::vector<Vec3> cloud;
    for (int i = 0; i < 64; ++i) {
        cloud.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(4, 6)});
    }
    CameraRig rig = make_stereo_rig(500.0, 1.0);
    CorrespondenceSet pairs = project_scene(cloud, rig, 0.0, rng);
    auto base = classify_scene(pairs, rig, 0.005);
    REQUIRE(base.ok());

    for (double s : {0.25, 3.0, 11.0}) {
        std::vector<Vec3> scaled;
        for (const Vec3& p : cloud) scaled.push_back(p * s);
        CameraRig scaled_rig = make_stereo_rig(500.0, 1.0 * s);
        CorrespondenceSet scaled_pairs = project_scene(scaled, scaled_rig, 0.0, rng);
        auto report = classify_scene(scaled_pairs, scaled_rig, 0.005);
        REQUIRE(report.ok());
        CHECK(std::abs(report.value().normalized_score - base.value().normalized_score) <= 1e-9);
    }
}

TEST_CASE("raw rms residual is invariant under a rigid transform of the world") {
    Rng rng(131);
    std::vector<Vec3> cloud;
    for (int i = 0; i < 48; ++i) {
        cloud.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(4, 6)});
    }
    CameraRig rig = make_stereo_rig(500.0, 1.0);
    CorrespondenceSet pairs = project_scene(cloud, rig, 0.0, rng);
    auto base = classify_scene(pairs, rig, 0.005);
    REQUIRE(base.ok());

    // Apply one rigid motion (Q, d) to points and both camera poses:
    // x' = Q x + d, R' = R Q^T, t' = t - R Q^T d.
    Mat3 q = Mat3::rotation({0.3, -1.0, 0.5}, 1.1);
    Vec3 d{2.0, -1.0, 0.7};
    std::vector<Vec3> moved;
    for (const Vec3& p : cloud) moved.push_back(q * p + d);
    CameraRig moved_rig = rig;
    for (PinholeCamera* cam : {&moved_rig.cam_a, &moved_rig.cam_b}) {
        cam->rotation = cam->rotation * q.transposed();
        cam->translation = cam->translation - (cam->rotation * d);
    }
    REQUIRE(moved_rig.valid());
    CorrespondenceSet moved_pairs = project_scene(moved, moved_rig, 0.0, rng);
    auto report = classify_scene(moved_pairs, moved_rig, 0.005);
    REQUIRE(report.ok());
    CHECK(std::abs(report.value().rms_residual - base.value().rms_residual) <= 1e-9);
}

TEST_CASE("median planar score does not decrease with pixel noise") {
    CameraRig rig = make_stereo_rig(500.0, 1.0);
    const double sigmas[] = {0.0, 0.1, 0.3, 0.5};
    std::vector<double> medians;
    for (double sigma : sigmas) {
        std::vector<double> scores;
        for (int trial = 0; trial < 200; ++trial) {
            Rng rng(derive_seed(999, static_cast<std::uint64_t>(trial)));
            std::vector<Vec3> board;
            for (int i = 0; i < 24; ++i) {
                board.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), 5.0});
            }
            CorrespondenceSet pairs = project_scene(board, rig, sigma, rng);
            auto report = classify_scene(pairs, rig, 0.005);
            REQUIRE(report.ok());
            scores.push_back(report.value().normalized_score);
        }
        std::nth_element(scores.begin(), scores.begin() + scores.size() / 2, scores.end());
        medians.push_back(scores[scores.size() / 2]);
    }
    for (std::size_t i = 1; i < medians.size(); ++i) {
        CHECK(medians[i] >= medians[i - 1]);
    }
}

TEST_CASE("rig and correspondence files round-trip") {
    CameraRig rig = make_stereo_rig(640.0, 0.8);
    rig.cam_b.rotation = Mat3::rotation({0, 1, 0}, 0.02);
    std::string rig_text = serialize_rig(rig);
    auto parsed_rig = parse_rig(rig_text);
    REQUIRE(parsed_rig.ok());
    CHECK(serialize_rig(parsed_rig.value()) == rig_text);

    CorrespondenceSet pairs{{{1.25, -3.5}, {0.75, -3.25}}, {{10, 20}, {11, 21}}};
    std::string pairs_text = serialize_correspondences(pairs);
    auto parsed_pairs = parse_correspondences(pairs_text);
    REQUIRE(parsed_pairs.ok());
    REQUIRE(parsed_pairs.value().size() == 2);
    CHECK(parsed_pairs.value()[0].a.u == 1.25);
    CHECK(parsed_pairs.value()[1].b.v == 21);

    CHECK_FALSE(parse_rig("cam_a.focal_px=1\n").ok());
    CHECK_FALSE(parse_correspondences("pairs=1\n").ok());
}
