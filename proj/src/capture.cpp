#include "realseal/capture.hpp"

#include <algorithm>
#include <cmath>

#include "realseal/rng.hpp"
#include "realseal/timeutil.hpp"
#include "realseal/trust_client.hpp"
#include "realseal/trust_service.hpp"

namespace realseal::capture {

using geometry::CameraRig;
using geometry::PixelPair;
using geometry::Vec3;

DeviceIdentity DeviceIdentity::create(std::string device_id, crypto::KeyPair keypair) {
    DeviceIdentity device;
    device.device_id = std::move(device_id);
    device.fingerprint = crypto::fingerprint_of(keypair.public_key);
    device.keypair = std::move(keypair);
    return device;
}

Bytes render_point_splat(const sensing::Scene& scene, const geometry::PinholeCamera& camera,
                         int width, int height) {
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(width) * height, 0);
    double half_w = width / 2.0, half_h = height / 2.0;
    // Pixel scale chosen so a +-1 lateral spread at depth ~5 fills the frame.
    for (std::size_t i = 0; i < scene.points.size(); ++i) {
        auto px = geometry::project(scene.points[i], camera);
        if (!px.ok()) continue;
        double su = px.value().u / camera.focal_px * 4.0;  // normalized image plane
        double sv = px.value().v / camera.focal_px * 4.0;
        int x = static_cast<int>(std::lround(half_w + su * half_w / 2.0));
        int y = static_cast<int>(std::lround(half_h + sv * half_h / 2.0));
        std::uint8_t shade = static_cast<std::uint8_t>(64 + (i * 37) % 192);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                int xx = x + dx, yy = y + dy;
                if (xx < 0 || yy < 0 || xx >= width || yy >= height) continue;
                auto& cell = raster[static_cast<std::size_t>(yy) * width + xx];
                cell = std::max(cell, shade);
            }
        }
    }
    std::string header =
        "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    Bytes out = to_bytes(header);
    out.insert(out.end(), raster.begin(), raster.end());
    return out;
}

namespace {

Result<CaptureResult, CaptureError> build_capture(const sensing::Scene& scene, Bytes payload,
                                                  const DeviceIdentity& device,
                                                  SceneLabel forced_label, bool auto_label,
                                                  const CaptureConfig& config) {
    Rng rng(derive_seed(config.seed, "pixel-noise"));
    CaptureResult result;
    result.correspondences.reserve(scene.points.size());
    for (const Vec3& point : scene.points) {
        auto a = geometry::project(point, config.rig.cam_a);
        if (!a.ok()) return CaptureError{"cam_a projection: " + a.error().detail};
        auto b = geometry::project(point, config.rig.cam_b);
        if (!b.ok()) return CaptureError{"cam_b projection: " + b.error().detail};
        PixelPair pair{a.value(), b.value()};
        if (config.pixel_noise_sigma > 0) {
            pair.a.u += rng.gaussian(0.0, config.pixel_noise_sigma);
            pair.a.v += rng.gaussian(0.0, config.pixel_noise_sigma);
            pair.b.u += rng.gaussian(0.0, config.pixel_noise_sigma);
            pair.b.v += rng.gaussian(0.0, config.pixel_noise_sigma);
        }
        result.correspondences.push_back(pair);
    }

    SceneLabel label = forced_label;
    if (auto_label) {
        auto report = geometry::classify_scene(result.correspondences, config.rig,
                                               config.planarity_threshold);
        if (!report.ok()) {
            return CaptureError{"auto label needs classifiable geometry: " +
                                report.error().detail};
        }
        label = report.value().label;
    }

    ProvenanceManifest manifest;
    manifest.claim_version = 1;
    manifest.signer_fingerprint = device.fingerprint;
    manifest.content_hash = crypto::content_hash(payload);
    manifest.inner_format = config.inner_format;
    manifest.scene_label = label;
    manifest.capture_time = config.capture_time;
    manifest.device_id = device.device_id;

    auto signature = sign_manifest(manifest, device.keypair.private_key);
    if (!signature.ok()) return CaptureError{"sign: " + signature.error().detail};

    auto bytes =
        write_container(payload, config.inner_format, manifest, signature.value());
    if (!bytes.ok()) return CaptureError{"write refused: " + bytes.error().detail};
    result.container_bytes = std::move(bytes).value();
    result.manifest = manifest;
    return result;
}

}  // namespace

Result<CaptureResult, CaptureError> capture(const sensing::Scene& scene,
                                            const DeviceIdentity& device, LabelPolicy policy,
                                            const CaptureConfig& config) {
    if (scene.points.empty()) return CaptureError{"scene has no points"};
    Bytes payload = render_point_splat(scene, config.rig.cam_a);
    SceneLabel forced =
        policy == LabelPolicy::Force2D ? SceneLabel::Label2D : SceneLabel::Label3D;
    return build_capture(scene, std::move(payload), device, forced,
                         policy == LabelPolicy::Auto, config);
}

Result<CaptureResult, CaptureError> recapture_attack(std::span<const std::uint8_t> payload,
                                                     const DeviceIdentity& device,
                                                     double screen_depth,
                                                     const CaptureConfig& config, int grid_side) {
    if (grid_side < 2) return CaptureError{"grid_side must be at least 2"};
    if (!(screen_depth > 0)) return CaptureError{"screen must be in front of the rig"};

    // The screen: a regular grid of sample points on the plane z = screen_depth.
    sensing::Scene screen;
    screen.points.reserve(static_cast<std::size_t>(grid_side) * grid_side);
    for (int r = 0; r < grid_side; ++r) {
        for (int c = 0; c < grid_side; ++c) {
            double x = -1.0 + 2.0 * c / (grid_side - 1);
            double y = -1.0 + 2.0 * r / (grid_side - 1);
            screen.points.push_back({x, y, screen_depth});
        }
    }

    // The recaptured rendition: a fresh photo of the screen, its shading
    // seeded from the displayed payload so distinct inputs give distinct bytes.
    Bytes rendition = render_point_splat(screen, config.rig.cam_a);
    crypto::Digest source = crypto::content_hash(payload);
    rendition.insert(rendition.end(), source.bytes.begin(), source.bytes.end());

    // The attacker lies: the manifest claims a 3D scene.
    return build_capture(screen, std::move(rendition), device, SceneLabel::Label3D,
                         /*auto_label=*/false, config);
}

Result<DemoReport, DemoError> run_spoof_demo(const DemoConfig& config) {
    CaptureConfig capture_config;
    capture_config.rig = geometry::make_stereo_rig(config.focal_px, config.baseline);
    capture_config.pixel_noise_sigma = config.pixel_noise_sigma;
    capture_config.planarity_threshold = config.planarity_threshold;
    capture_config.seed = config.seed;
    capture_config.capture_time =
        config.capture_time != 0 ? config.capture_time : now_utc();

    auto device_keys = crypto::generate_keypair();
    DeviceIdentity device = DeviceIdentity::create("demo-cam-01", device_keys);

    // Trust source, in preference order: an already-running CA endpoint, an
    // existing trust-list file (unregistered scenario only, since the fresh
    // demo key cannot be in it), or a throwaway in-process CA.
    trust::TrustList list;
    if (!config.ca_url.empty()) {
        if (config.scenario != DemoScenario::UnregisteredAttacker) {
            auto registered =
                trust::remote_register(config.ca_url, "Demo Cams Inc", device.keypair.public_key);
            if (!registered.ok()) return DemoError{"register: " + registered.error().detail};
            auto approved =
                trust::remote_approve(config.ca_url, device.fingerprint, config.admin_token);
            if (!approved.ok()) return DemoError{"approve: " + approved.error().detail};
        }
        auto fetched = trust::fetch_trust_list(config.ca_url);
        if (!fetched.ok()) return DemoError{"trust list fetch: " + fetched.error().detail};
        list = std::move(fetched).value();
    } else if (!config.trustlist_path.empty()) {
        auto bytes = read_file_bytes(config.trustlist_path);
        if (!bytes) return DemoError{"cannot read trust list " + config.trustlist_path};
        auto validated = trust::validate_trust_list(to_string(*bytes));
        if (!validated.ok()) {
            return DemoError{"trust list rejected: " + validated.error().detail};
        }
        list = std::move(validated).value();
        if (config.scenario != DemoScenario::UnregisteredAttacker) {
            return DemoError{"external trust lists cannot contain the demo device; "
                             "only the unregistered-attacker scenario supports them"};
        }
    } else {
        auto temp = std::filesystem::temp_directory_path() /
                    ("realseal-demo-" + std::to_string(derive_seed(config.seed, "demo")));
        std::filesystem::create_directories(temp);
        trust::ServiceConfig service_config;
        service_config.admin_token = "demo-admin";
        service_config.log_path = temp / "ca.log";
        service_config.ca_key_path = temp / "ca.key";
        std::filesystem::remove(service_config.log_path);
        std::filesystem::remove(service_config.ca_key_path);
        auto service = trust::TrustService::open(std::move(service_config));
        if (!service.ok()) return DemoError{"demo CA: " + service.error().detail};

        if (config.scenario != DemoScenario::UnregisteredAttacker) {
            auto registered =
                service.value()->register_manufacturer("Demo Cams Inc", device.keypair.public_key);
            if (!registered.ok()) return DemoError{"register: " + registered.error().detail};
            auto approved = service.value()->approve(device.fingerprint, "demo-admin");
            if (!approved.ok()) return DemoError{"approve: " + approved.error().detail};
        } else {
            // The list must be non-empty (and version > 0) to validate, so
            // approve an unrelated manufacturer.
            auto other = crypto::generate_keypair();
            auto registered =
                service.value()->register_manufacturer("Other Cams Ltd", other.public_key);
            if (!registered.ok()) return DemoError{"register: " + registered.error().detail};
            auto approved = service.value()->approve(
                crypto::fingerprint_of(other.public_key), "demo-admin");
            if (!approved.ok()) return DemoError{"approve: " + approved.error().detail};
        }
        auto validated =
            trust::validate_trust_list(service.value()->current_list()->bytes,
                                       service.value()->ca_public_key());
        if (!validated.ok()) return DemoError{"self-validation: " + validated.error().detail};
        list = std::move(validated).value();
    }

    Result<CaptureResult, CaptureError> shot = CaptureError{"unreachable"};
    if (config.scenario == DemoScenario::GenuineCapture) {
        sensing::ScenePopulation population;
        population.kind = sensing::PopulationKind::Real;
        population.depth_center = config.screen_depth;
        population.depth_halfwidth = 1.0;
        population.points_per_scene = 64;
        sensing::Scene scene = sensing::sample_scene(population, config.seed);
        shot = capture(scene, device, LabelPolicy::Auto, capture_config);
    } else {
        // A stand-in synthetic image; its content is irrelevant to verdicts.
        Bytes synthetic = to_bytes("synthetic-image-payload");
        shot = recapture_attack(synthetic, device, config.screen_depth, capture_config);
    }
    if (!shot.ok()) return DemoError{"capture: " + shot.error().detail};

    DemoReport report;
    report.claimed_label = shot.value().manifest.scene_label;
    report.pki = verify_container_bytes(shot.value().container_bytes, list);

    auto planarity = geometry::classify_scene(shot.value().correspondences, capture_config.rig,
                                              config.planarity_threshold);
    if (!planarity.ok()) return DemoError{"planarity: " + planarity.error().detail};
    report.planarity = planarity.value();

    report.deceived = report.pki.verdict == Verdict::Verified &&
                      report.planarity.label == SceneLabel::Label2D;
    if (report.deceived) {
        report.mitigation =
            "signature checks cannot see the scene; cross-check the manifest scene label "
            "(claimed " + std::string(scene_label_text(report.claimed_label)) +
            ") against the geometric label (measured 2D) and distrust the mismatch";
    }
    return report;
}

}  // namespace realseal::capture
