#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "realseal/container.hpp"
#include "realseal/geometry.hpp"
#include "realseal/sensing.hpp"

namespace realseal::capture {

// Simulated PKI-enabled camera: renders a procedural payload from a scene,
// signs a manifest over it, and emits `.real` container bytes together with
// the stereo correspondences the rig saw.

struct DeviceIdentity {
    std::string device_id;
    crypto::KeyPair keypair;
    crypto::Fingerprint fingerprint;

    static DeviceIdentity create(std::string device_id, crypto::KeyPair keypair);
};

enum class LabelPolicy {
    Auto,     // classify_scene on the emitted correspondences
    Force2D,
    Force3D,
};

struct CaptureConfig {
    geometry::CameraRig rig = geometry::make_stereo_rig(500.0, 1.0);
    double pixel_noise_sigma = 0.0;
    double planarity_threshold = geometry::kDefaultPlanarityThreshold;
    std::uint64_t seed = 0;
    std::int64_t capture_time = 0;
    std::string inner_format = "pgm";
};

struct CaptureError {
    std::string detail;
};

struct CaptureResult {
    Bytes container_bytes;
    geometry::CorrespondenceSet correspondences;
    ProvenanceManifest manifest;
};

Result<CaptureResult, CaptureError> capture(const sensing::Scene& scene,
                                            const DeviceIdentity& device, LabelPolicy policy,
                                            const CaptureConfig& config);

// The replay attack: the payload is re-displayed on a plane at screen_depth
// and photographed with the trusted device key; the manifest claims 3D.
Result<CaptureResult, CaptureError> recapture_attack(std::span<const std::uint8_t> payload,
                                                     const DeviceIdentity& device,
                                                     double screen_depth,
                                                     const CaptureConfig& config,
                                                     int grid_side = 8);

// Deterministic point-splat rasterizer (binary PGM bytes). Payload content is
// opaque to every verdict; this just gives captures plausible image bytes.
Bytes render_point_splat(const sensing::Scene& scene, const geometry::PinholeCamera& camera,
                         int width = 64, int height = 64);

enum class DemoScenario {
    RecaptureAttack,      // trusted key photographs a screen, claims 3D
    UnregisteredAttacker, // same capture, key never registered
    GenuineCapture,       // honest 3D scene
};

struct DemoConfig {
    DemoScenario scenario = DemoScenario::RecaptureAttack;
    double focal_px = 500.0;
    double baseline = 1.0;
    double screen_depth = 5.0;
    double pixel_noise_sigma = 0.0;
    double planarity_threshold = geometry::kDefaultPlanarityThreshold;
    std::uint64_t seed = 7;
    std::int64_t capture_time = 0;  // 0 = now
    // Trust source: a running CA endpoint (registers the demo device there),
    // else a trust-list file, else a throwaway in-process CA.
    std::string ca_url;
    std::string admin_token;
    std::string trustlist_path;
};

struct DemoReport {
    VerificationReport pki;
    geometry::PlanarityReport planarity;
    SceneLabel claimed_label = SceneLabel::Label3D;
    bool deceived = false;  // PKI verified AND geometry says 2D
    std::string mitigation;
};

struct DemoError {
    std::string detail;
};

Result<DemoReport, DemoError> run_spoof_demo(const DemoConfig& config);

}  // namespace realseal::capture
