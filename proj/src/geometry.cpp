#include "realseal/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "realseal/kv.hpp"

namespace realseal::geometry {

Mat3 Mat3::transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
    return t;
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r.m[i][j] = 0;
            for (int k = 0; k < 3; ++k) r.m[i][j] += m[i][k] * o.m[k][j];
        }
    }
    return r;
}

bool Mat3::orthonormal(double tol) const {
    Mat3 rtr = transposed() * (*this);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double expected = i == j ? 1.0 : 0.0;
            if (std::abs(rtr.m[i][j] - expected) > tol) return false;
        }
    }
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return std::abs(det - 1.0) <= tol * 10;
}

Mat3 Mat3::rotation(const Vec3& axis, double angle) {
    Vec3 u = axis.normalized();
    double c = std::cos(angle), s = std::sin(angle), t = 1 - c;
    Mat3 r;
    r.m = {{{c + u.x * u.x * t, u.x * u.y * t - u.z * s, u.x * u.z * t + u.y * s},
            {u.y * u.x * t + u.z * s, c + u.y * u.y * t, u.y * u.z * t - u.x * s},
            {u.z * u.x * t - u.y * s, u.z * u.y * t + u.x * s, c + u.z * u.z * t}}};
    return r;
}

Vec3 PinholeCamera::world_ray_direction(const Pixel& px) const {
    Vec3 dir_cam{(px.u - cx) / focal_px, (px.v - cy) / focal_px, 1.0};
    return (rotation.transposed() * dir_cam).normalized();
}

Result<Pixel, GeometryError> project(const Vec3& point_world, const PinholeCamera& camera) {
    if (!camera.valid()) {
        return GeometryError{GeometryErrorKind::InvalidCamera, "camera pose is not a rotation"};
    }
    Vec3 p = camera.rotation * point_world + camera.translation;
    if (!(p.z > 0)) {
        return GeometryError{GeometryErrorKind::BehindCamera,
                             "point has nonpositive depth in camera frame"};
    }
    return Pixel{camera.focal_px * p.x / p.z + camera.cx,
                 camera.focal_px * p.y / p.z + camera.cy};
}

Result<Vec3, GeometryError> triangulate(const PixelPair& pair, const CameraRig& rig,
                                        double min_ray_angle) {
    if (!rig.valid()) {
        return GeometryError{GeometryErrorKind::InvalidCamera, "rig invalid or zero baseline"};
    }
    Vec3 o1 = rig.cam_a.center();
    Vec3 o2 = rig.cam_b.center();
    Vec3 d1 = rig.cam_a.world_ray_direction(pair.a);
    Vec3 d2 = rig.cam_b.world_ray_direction(pair.b);

    double cross_norm = d1.cross(d2).norm();
    double angle = std::asin(std::clamp(cross_norm, 0.0, 1.0));
    if (d1.dot(d2) < 0) angle = 3.14159265358979323846 - angle;
    if (angle < min_ray_angle) {
        return GeometryError{GeometryErrorKind::DegenerateRays,
                             "rays are parallel within tolerance"};
    }

    // Closest points o1 + s*d1 and o2 + t*d2; both directions are unit.
    Vec3 w = o1 - o2;
    double b = d1.dot(d2);
    double d = d1.dot(w);
    double e = d2.dot(w);
    double denom = 1.0 - b * b;
    double s = (b * e - d) / denom;
    double t = (e - b * d) / denom;
    Vec3 p1 = o1 + d1 * s;
    Vec3 p2 = o2 + d2 * t;
    return (p1 + p2) * 0.5;
}

namespace {

// One Jacobi sweep pass for a symmetric 3x3; rotates (p,q) to zero a[p][q].
void jacobi_rotate(std::array<std::array<double, 3>, 3>& a,
                   std::array<std::array<double, 3>, 3>& v, int p, int q) {
    if (std::abs(a[p][q]) < 1e-300) return;
    double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
    double t = (theta >= 0 ? 1.0 : -1.0) /
               (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    double c = 1.0 / std::sqrt(t * t + 1.0);
    double s = t * c;

    double app = a[p][p], aqq = a[q][q], apq = a[p][q];
    a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
    a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
    a[p][q] = a[q][p] = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (k == p || k == q) continue;
        double akp = a[k][p], akq = a[k][q];
        a[k][p] = a[p][k] = c * akp - s * akq;
        a[k][q] = a[q][k] = s * akp + c * akq;
    }
    for (int k = 0; k < 3; ++k) {
        double vkp = v[k][p], vkq = v[k][q];
        v[k][p] = c * vkp - s * vkq;
        v[k][q] = s * vkp + c * vkq;
    }
}

}  // namespace

Result<PlaneFit, GeometryError> fit_plane(std::span<const Vec3> points) {
    if (points.size() < 3) {
        return GeometryError{GeometryErrorKind::DegeneratePoints, "need at least 3 points"};
    }
    Vec3 centroid{};
    for (const Vec3& p : points) centroid = centroid + p;
    centroid = centroid * (1.0 / static_cast<double>(points.size()));

    std::array<std::array<double, 3>, 3> cov{};
    for (const Vec3& p : points) {
        Vec3 d = p - centroid;
        double dv[3] = {d.x, d.y, d.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov[i][j] += dv[i] * dv[j];
    }
    double n = static_cast<double>(points.size());
    for (auto& row : cov)
        for (double& x : row) x /= n;

    std::array<std::array<double, 3>, 3> v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = std::abs(cov[0][1]) + std::abs(cov[0][2]) + std::abs(cov[1][2]);
        if (off < 1e-30) break;
        jacobi_rotate(cov, v, 0, 1);
        jacobi_rotate(cov, v, 0, 2);
        jacobi_rotate(cov, v, 1, 2);
    }

    int smallest = 0, largest = 0, mid;
    for (int i = 1; i < 3; ++i) {
        if (cov[i][i] < cov[smallest][smallest]) smallest = i;
        if (cov[i][i] > cov[largest][largest]) largest = i;
    }
    mid = 3 - smallest - largest;
    if (smallest == largest) mid = (smallest + 1) % 3;  // all equal

    // Collinear clouds have two vanishing principal directions.
    double mid_var = cov[mid][mid];
    double span_scale = cov[largest][largest];
    if (span_scale <= 0 || mid_var <= span_scale * 1e-24) {
        return GeometryError{GeometryErrorKind::DegeneratePoints,
                             "points are collinear (rank-deficient)"};
    }

    PlaneFit fit;
    fit.normal = Vec3{v[0][smallest], v[1][smallest], v[2][smallest]}.normalized();
    fit.offset = fit.normal.dot(centroid);
    double sum_sq = 0;
    for (const Vec3& p : points) {
        double r = fit.normal.dot(p) - fit.offset;
        sum_sq += r * r;
    }
    fit.rms_residual = std::sqrt(sum_sq / n);
    return fit;
}

Result<PlanarityReport, GeometryError> classify_scene(std::span<const PixelPair> correspondences,
                                                      const CameraRig& rig, double threshold) {
    PlanarityReport report;
    report.threshold_used = threshold;
    for (const PixelPair& pair : correspondences) {
        auto point = triangulate(pair, rig);
        if (point.ok()) report.points_3d.push_back(point.value());
    }
    if (report.points_3d.size() < 4) {
        return GeometryError{GeometryErrorKind::InsufficientGeometry,
                             "need at least 4 triangulated correspondences, got " +
                                 std::to_string(report.points_3d.size())};
    }
    auto fit = fit_plane(report.points_3d);
    if (!fit.ok()) return fit.error();
    report.plane_normal = fit.value().normal;
    report.plane_offset = fit.value().offset;
    report.rms_residual = fit.value().rms_residual;

    double mean_depth = 0;
    for (const Vec3& p : report.points_3d) {
        mean_depth += (rig.cam_a.rotation * p + rig.cam_a.translation).z;
    }
    mean_depth /= static_cast<double>(report.points_3d.size());
    if (!(mean_depth > 0)) {
        return GeometryError{GeometryErrorKind::DegeneratePoints,
                             "triangulated cloud has nonpositive mean depth"};
    }
    report.normalized_score = report.rms_residual / mean_depth;
    report.label =
        report.normalized_score <= threshold ? SceneLabel::Label2D : SceneLabel::Label3D;
    return report;
}

namespace {

std::string fmt_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::optional<double> parse_double(const std::string* s) {
    if (!s || s->empty()) return std::nullopt;
    double value = 0;
    auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), value);
    if (ec != std::errc() || ptr != s->data() + s->size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

void push_camera(std::vector<kv::Entry>& out, const std::string& prefix,
                 const PinholeCamera& cam) {
    out.push_back({prefix + ".focal_px", fmt_double(cam.focal_px)});
    out.push_back({prefix + ".cx", fmt_double(cam.cx)});
    out.push_back({prefix + ".cy", fmt_double(cam.cy)});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.push_back({prefix + ".r" + std::to_string(i) + std::to_string(j),
                           fmt_double(cam.rotation.m[i][j])});
    out.push_back({prefix + ".tx", fmt_double(cam.translation.x)});
    out.push_back({prefix + ".ty", fmt_double(cam.translation.y)});
    out.push_back({prefix + ".tz", fmt_double(cam.translation.z)});
}

Result<PinholeCamera, GeometryError> pull_camera(const std::vector<kv::Entry>& fields,
                                                 const std::string& prefix) {
    PinholeCamera cam;
    auto get = [&](const std::string& key) {
        return parse_double(kv::find(fields, prefix + "." + key));
    };
    auto focal = get("focal_px");
    auto cx = get("cx");
    auto cy = get("cy");
    auto tx = get("tx");
    auto ty = get("ty");
    auto tz = get("tz");
    if (!focal || !cx || !cy || !tx || !ty || !tz) {
        return GeometryError{GeometryErrorKind::InvalidCamera,
                             "missing or malformed field under " + prefix};
    }
    cam.focal_px = *focal;
    cam.cx = *cx;
    cam.cy = *cy;
    cam.translation = {*tx, *ty, *tz};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            auto rij = get("r" + std::to_string(i) + std::to_string(j));
            if (!rij) {
                return GeometryError{GeometryErrorKind::InvalidCamera,
                                     "missing rotation entry under " + prefix};
            }
            cam.rotation.m[i][j] = *rij;
        }
    }
    if (!cam.valid()) {
        return GeometryError{GeometryErrorKind::InvalidCamera,
                             prefix + " is not a valid pinhole camera"};
    }
    return cam;
}

}  // namespace

std::string serialize_rig(const CameraRig& rig) {
    std::vector<kv::Entry> entries;
    push_camera(entries, "cam_a", rig.cam_a);
    push_camera(entries, "cam_b", rig.cam_b);
    return kv::serialize(std::move(entries));
}

Result<CameraRig, GeometryError> parse_rig(std::string_view text) {
    auto parsed = kv::parse(text);
    if (!parsed.ok()) {
        return GeometryError{GeometryErrorKind::InvalidCamera,
                             "rig file: " + parsed.error().detail};
    }
    auto a = pull_camera(parsed.value(), "cam_a");
    if (!a.ok()) return a.error();
    auto b = pull_camera(parsed.value(), "cam_b");
    if (!b.ok()) return b.error();
    CameraRig rig{a.value(), b.value()};
    if (!rig.valid()) {
        return GeometryError{GeometryErrorKind::InvalidCamera, "rig has zero baseline"};
    }
    return rig;
}

std::string serialize_correspondences(std::span<const PixelPair> pairs) {
    std::vector<kv::Entry> entries;
    entries.push_back({"pairs", std::to_string(pairs.size())});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string prefix = "pair." + std::to_string(i) + ".";
        entries.push_back({prefix + "a.u", fmt_double(pairs[i].a.u)});
        entries.push_back({prefix + "a.v", fmt_double(pairs[i].a.v)});
        entries.push_back({prefix + "b.u", fmt_double(pairs[i].b.u)});
        entries.push_back({prefix + "b.v", fmt_double(pairs[i].b.v)});
    }
    return kv::serialize(std::move(entries));
}

Result<CorrespondenceSet, GeometryError> parse_correspondences(std::string_view text) {
    auto parsed = kv::parse(text);
    if (!parsed.ok()) {
        return GeometryError{GeometryErrorKind::InsufficientGeometry,
                             "pairs file: " + parsed.error().detail};
    }
    const auto& fields = parsed.value();
    const std::string* count_text = kv::find(fields, "pairs");
    if (!count_text) {
        return GeometryError{GeometryErrorKind::InsufficientGeometry, "pairs count missing"};
    }
    std::size_t count = 0;
    auto [ptr, ec] =
        std::from_chars(count_text->data(), count_text->data() + count_text->size(), count);
    if (ec != std::errc() || ptr != count_text->data() + count_text->size()) {
        return GeometryError{GeometryErrorKind::InsufficientGeometry, "pairs count malformed"};
    }
    CorrespondenceSet pairs;
    for (std::size_t i = 0; i < count; ++i) {
        std::string prefix = "pair." + std::to_string(i) + ".";
        auto au = parse_double(kv::find(fields, prefix + "a.u"));
        auto av = parse_double(kv::find(fields, prefix + "a.v"));
        auto bu = parse_double(kv::find(fields, prefix + "b.u"));
        auto bv = parse_double(kv::find(fields, prefix + "b.v"));
        if (!au || !av || !bu || !bv) {
            return GeometryError{GeometryErrorKind::InsufficientGeometry,
                                 "pair " + std::to_string(i) + " missing or malformed"};
        }
        pairs.push_back({{*au, *av}, {*bu, *bv}});
    }
    if (pairs.empty()) {
        return GeometryError{GeometryErrorKind::InsufficientGeometry,
                             "correspondence set must be nonempty"};
    }
    return pairs;
}

CameraRig make_stereo_rig(double focal_px, double baseline) {
    CameraRig rig;
    rig.cam_a.focal_px = focal_px;
    rig.cam_b.focal_px = focal_px;
    rig.cam_b.translation = {-baseline, 0, 0};  // camera center at (baseline, 0, 0)
    return rig;
}

}  // namespace realseal::geometry
