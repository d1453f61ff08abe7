// realseal: sign, wrap, verify, and audit camera-provenance containers, run
// the CA, and drive the anti-spoof geometry and sensing-design harnesses.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "realseal/capture.hpp"
#include "realseal/container.hpp"
#include "realseal/geometry.hpp"
#include "realseal/kv.hpp"
#include "realseal/scan.hpp"
#include "realseal/sensing.hpp"
#include "realseal/timeutil.hpp"
#include "realseal/trust_client.hpp"
#include "realseal/trust_http.hpp"
#include "realseal/trust_service.hpp"

using namespace realseal;

namespace {

// Exit codes; verify's verdict mapping is part of the tool's contract.
enum ExitCode : int {
    kOk = 0,
    kMalformed = 2,
    kUntrusted = 3,
    kTampered = 4,
    kRevoked = 5,
    kRefusedUnverified = 6,
    kUsage = 64,
    kDataError = 65,
    kNoInput = 66,
    kUnavailable = 69,
    kInternal = 70,
    kCantCreate = 73,
    kUnauthorized = 77,
    kAlreadyRegistered = 80,
    kNotFound = 81,
    kInvalidTransition = 82,
};

int exit_for_verdict(Verdict verdict) {
    switch (verdict) {
        case Verdict::Verified: return kOk;
        case Verdict::Malformed: return kMalformed;
        case Verdict::UntrustedSigner: return kUntrusted;
        case Verdict::Tampered: return kTampered;
        case Verdict::RevokedSigner: return kRevoked;
    }
    return kInternal;
}

int exit_for_client_error(const trust::ClientError& error) {
    if (error.kind == trust::ClientErrorKind::Unreachable) return kUnavailable;
    if (error.kind == trust::ClientErrorKind::Rejected) return kDataError;
    // Admin endpoints surface their HTTP status inside detail; map the
    // common ones back to the service table.
    if (error.detail.find(" 401") != std::string::npos) return kUnauthorized;
    if (error.detail.find(" 404") != std::string::npos) return kNotFound;
    if (error.detail.find(" 409 AlreadyRegistered") != std::string::npos) {
        return kAlreadyRegistered;
    }
    if (error.detail.find(" 409") != std::string::npos) return kInvalidTransition;
    return kUnavailable;
}

struct OutputFormat {
    bool machine = false;
};

void emit(const OutputFormat& format, std::vector<kv::Entry> entries) {
    if (format.machine) {
        std::fputs(kv::serialize(std::move(entries)).c_str(), stdout);
        return;
    }
    for (const auto& [key, value] : entries) {
        std::printf("%s: %s\n", key.c_str(), value.c_str());
    }
}

int fail(const OutputFormat& format, int code, const std::string& message) {
    if (format.machine) {
        std::fputs(kv::serialize({{"error", message}}).c_str(), stdout);
    } else {
        std::fprintf(stderr, "error: %s\n", message.c_str());
    }
    return code;
}

std::string fmt_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

// ---- trust source ----------------------------------------------------------

struct TrustSourceFlags {
    std::string trustlist_path;
    std::string ca_url;
    std::string ca_root_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--trustlist", trustlist_path, "validated trust list file");
        cmd->add_option("--ca-url", ca_url,
                        "CA base URL (default: $REALSEAL_CA_URL)")
            ->envname("REALSEAL_CA_URL");
        cmd->add_option("--ca-root", ca_root_path, "pinned CA root public key file");
    }

    Result<trust::TrustList, std::pair<int, std::string>> load() const {
        std::optional<crypto::PublicKey> pinned;
        if (!ca_root_path.empty()) {
            auto bytes = read_file_bytes(ca_root_path);
            if (!bytes) {
                return std::pair{int(kNoInput), "cannot read " + ca_root_path};
            }
            auto key = crypto::parse_public_key_file(to_string(*bytes));
            if (!key.ok()) {
                return std::pair{int(kDataError), "CA root key: " + key.error().detail};
            }
            pinned = key.value();
        }
        if (!trustlist_path.empty()) {
            auto bytes = read_file_bytes(trustlist_path);
            if (!bytes) {
                return std::pair{int(kNoInput), "cannot read " + trustlist_path};
            }
            auto list = trust::validate_trust_list(to_string(*bytes), pinned);
            if (!list.ok()) {
                return std::pair{int(kDataError), "trust list rejected: " + list.error().detail};
            }
            return std::move(list).value();
        }
        if (!ca_url.empty()) {
            auto list = trust::fetch_trust_list(ca_url, pinned);
            if (!list.ok()) {
                return std::pair{exit_for_client_error(list.error()), list.error().detail};
            }
            return std::move(list).value();
        }
        return std::pair{int(kUsage),
                         std::string("no trust source: pass --trustlist or --ca-url "
                                     "(or set REALSEAL_CA_URL)")};
    }
};

Result<crypto::KeyPair, std::pair<int, std::string>> load_keypair(const std::string& path) {
    auto bytes = read_file_bytes(path);
    if (!bytes) return std::pair{int(kNoInput), "cannot read " + path};
    auto key = crypto::parse_private_key_file(to_string(*bytes));
    if (!key.ok()) return std::pair{int(kDataError), path + ": " + key.error().detail};
    auto pair = crypto::generate_keypair(key.value().bytes);
    if (!pair.ok()) return std::pair{int(kDataError), pair.error().detail};
    return std::move(pair).value();
}

std::vector<kv::Entry> verification_entries(const VerificationReport& report) {
    std::vector<kv::Entry> entries{{"verdict", std::string(verdict_text(report.verdict))},
                                   {"detail", report.detail}};
    if (report.signer_fingerprint) {
        entries.push_back({"signer_fingerprint", report.signer_fingerprint->hex()});
    }
    if (report.scene_label) {
        entries.push_back({"scene_label", std::string(scene_label_text(*report.scene_label))});
    }
    return entries;
}

// ---- keygen ----------------------------------------------------------------

int cmd_keygen(const std::string& out_prefix, const std::string& seed_hex,
               const OutputFormat& format) {
    crypto::KeyPair pair;
    if (!seed_hex.empty()) {
        auto seed = hex_decode(seed_hex);
        if (!seed) return fail(format, kUsage, "--seed must be 64 hex chars");
        auto generated = crypto::generate_keypair(*seed);
        if (!generated.ok()) return fail(format, kUsage, generated.error().detail);
        pair = generated.value();
    } else {
        pair = crypto::generate_keypair();
    }
    std::string priv_path = out_prefix + ".priv";
    std::string pub_path = out_prefix + ".pub";
    if (!write_file_bytes(priv_path, to_bytes(crypto::encode_private_key_file(pair.private_key))) ||
        !write_file_bytes(pub_path, to_bytes(crypto::encode_public_key_file(pair.public_key)))) {
        return fail(format, kCantCreate, "cannot write key files at " + out_prefix);
    }
    emit(format, {{"fingerprint", crypto::fingerprint_of(pair.public_key).hex()},
                  {"private_key_file", priv_path},
                  {"public_key_file", pub_path}});
    return kOk;
}

// ---- ca --------------------------------------------------------------------

int cmd_ca_serve(const std::string& listen, const std::string& admin_token,
                 const std::string& log_path, const std::string& ca_key_path) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        std::fprintf(stderr, "error: --listen must be host:port\n");
        return kUsage;
    }
    std::string host = listen.substr(0, colon);
    int port = std::atoi(listen.c_str() + colon + 1);

    trust::ServiceConfig config;
    config.admin_token = admin_token;
    config.log_path = log_path;
    config.ca_key_path = ca_key_path;
    auto service = trust::TrustService::open(std::move(config));
    if (!service.ok()) {
        std::fprintf(stderr, "error: %s\n", service.error().detail.c_str());
        return service.error().kind == trust::ServiceErrorKind::InvalidInput ? kUsage : kInternal;
    }
    std::printf("ca_public_key: %s\n", service.value()->ca_public_key().hex().c_str());
    std::printf("list_version: %llu\n",
                static_cast<unsigned long long>(service.value()->current_list()->list.list_version));
    std::printf("listening on %s:%d\n", host.c_str(), port);
    std::fflush(stdout);

    trust::TrustHttpServer server(*service.value());
    if (!server.serve_blocking(host, port)) {
        std::fprintf(stderr, "error: cannot bind %s\n", listen.c_str());
        return kUnavailable;
    }
    return kOk;
}

int cmd_ca_register(const std::string& ca_url, const std::string& name,
                    const std::string& key_path, const OutputFormat& format) {
    if (ca_url.empty()) return fail(format, kUsage, "--ca-url required");
    auto bytes = read_file_bytes(key_path);
    if (!bytes) return fail(format, kNoInput, "cannot read " + key_path);
    auto key = crypto::parse_public_key_file(to_string(*bytes));
    if (!key.ok()) return fail(format, kDataError, key.error().detail);
    auto fingerprint = trust::remote_register(ca_url, name, key.value());
    if (!fingerprint.ok()) {
        return fail(format, exit_for_client_error(fingerprint.error()),
                    fingerprint.error().detail);
    }
    emit(format, {{"fingerprint", fingerprint.value().hex()}, {"status", "pending"}});
    return kOk;
}

int cmd_ca_admin(bool approve, const std::string& ca_url, const std::string& fingerprint_hex,
                 const std::string& admin_token, const std::string& reason,
                 const OutputFormat& format) {
    if (ca_url.empty()) return fail(format, kUsage, "--ca-url required");
    auto fingerprint = crypto::Fingerprint::from_hex(fingerprint_hex);
    if (!fingerprint) return fail(format, kUsage, "--fingerprint must be 32 hex chars");
    auto version = approve ? trust::remote_approve(ca_url, *fingerprint, admin_token)
                           : trust::remote_revoke(ca_url, *fingerprint, admin_token, reason);
    if (!version.ok()) {
        return fail(format, exit_for_client_error(version.error()), version.error().detail);
    }
    emit(format, {{"list_version", std::to_string(version.value())},
                  {"status", approve ? "active" : "revoked"}});
    return kOk;
}

// ---- sign ------------------------------------------------------------------

int cmd_sign(const std::string& key_path, const std::string& payload_path, std::string out_path,
             const std::string& label_flag, const std::string& rig_path,
             const std::string& pairs_path, const std::string& device_id,
             const std::string& time_text, std::string inner_format, double threshold,
             const OutputFormat& format) {
    auto keys = load_keypair(key_path);
    if (!keys.ok()) return fail(format, keys.error().first, keys.error().second);

    auto payload = read_file_bytes(payload_path);
    if (!payload) return fail(format, kNoInput, "cannot read " + payload_path);

    if (inner_format.empty()) {
        std::string ext = std::filesystem::path(payload_path).extension().string();
        if (!ext.empty() && ext.front() == '.') ext.erase(0, 1);
        for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        inner_format = ext;
    }
    if (!valid_inner_format(inner_format)) {
        return fail(format, kUsage,
                    "inner format '" + inner_format + "' must match [a-z0-9]{1,16}; "
                    "pass --inner-format");
    }

    SceneLabel label;
    if (label_flag == "2d") {
        label = SceneLabel::Label2D;
    } else if (label_flag == "3d") {
        label = SceneLabel::Label3D;
    } else if (label_flag == "auto") {
        if (rig_path.empty() || pairs_path.empty()) {
            return fail(format, kUsage, "--scene-label auto needs --rig and --pairs");
        }
        auto rig_bytes = read_file_bytes(rig_path);
        auto pair_bytes = read_file_bytes(pairs_path);
        if (!rig_bytes || !pair_bytes) {
            return fail(format, kNoInput, "cannot read rig/pairs files");
        }
        auto rig = geometry::parse_rig(to_string(*rig_bytes));
        if (!rig.ok()) return fail(format, kDataError, rig.error().detail);
        auto pairs = geometry::parse_correspondences(to_string(*pair_bytes));
        if (!pairs.ok()) return fail(format, kDataError, pairs.error().detail);
        auto report = geometry::classify_scene(pairs.value(), rig.value(), threshold);
        if (!report.ok()) return fail(format, kDataError, report.error().detail);
        label = report.value().label;
    } else {
        return fail(format, kUsage, "--scene-label must be 2d, 3d, or auto");
    }

    std::int64_t capture_time = now_utc();
    if (!time_text.empty()) {
        auto parsed = parse_utc(time_text);
        if (!parsed) return fail(format, kUsage, "--time must be YYYY-MM-DDThh:mm:ssZ");
        capture_time = *parsed;
    }

    if (out_path.empty()) out_path = payload_path + std::string(kRealExtension);
    if (!out_path.ends_with(kRealExtension)) {
        return fail(format, kUsage, "--out must end with .real (convention <name>.<ext>.real)");
    }

    ProvenanceManifest manifest;
    manifest.signer_fingerprint = crypto::fingerprint_of(keys.value().public_key);
    manifest.content_hash = crypto::content_hash(*payload);
    manifest.inner_format = inner_format;
    manifest.scene_label = label;
    manifest.capture_time = capture_time;
    manifest.device_id = device_id;

    auto signature = sign_manifest(manifest, keys.value().private_key);
    if (!signature.ok()) return fail(format, kDataError, signature.error().detail);
    auto container = write_container(*payload, inner_format, manifest, signature.value());
    if (!container.ok()) return fail(format, kDataError, container.error().detail);
    if (!write_file_bytes(out_path, container.value())) {
        return fail(format, kCantCreate, "cannot write " + out_path);
    }
    emit(format, {{"out", out_path},
                  {"scene_label", std::string(scene_label_text(label))},
                  {"signer_fingerprint", manifest.signer_fingerprint.hex()},
                  {"content_hash", manifest.content_hash.hex()},
                  {"capture_time", format_utc(capture_time)}});
    return kOk;
}

// ---- verify / inspect / unwrap ----------------------------------------------

int cmd_verify(const std::string& path, const TrustSourceFlags& source,
               const OutputFormat& format) {
    auto list = source.load();
    if (!list.ok()) return fail(format, list.error().first, list.error().second);
    auto bytes = read_file_bytes(path);
    if (!bytes) return fail(format, kNoInput, "cannot read " + path);
    VerificationReport report = verify_container_bytes(*bytes, list.value());
    emit(format, verification_entries(report));
    return exit_for_verdict(report.verdict);
}

int cmd_inspect(const std::string& path, const OutputFormat& format) {
    auto bytes = read_file_bytes(path);
    if (!bytes) return fail(format, kNoInput, "cannot read " + path);
    auto container = read_container(*bytes);
    if (!container.ok()) {
        emit(format, {{"verdict", "malformed"}, {"detail", container.error().reason}});
        return kMalformed;
    }
    const RealContainer& c = container.value();
    emit(format, {{"version", std::to_string(c.version)},
                  {"scene_label", std::string(scene_label_text(c.scene_label))},
                  {"inner_format", c.inner_format},
                  {"payload_bytes", std::to_string(c.payload.size())},
                  {"capture_time", format_utc(c.manifest.capture_time)},
                  {"device_id", c.manifest.device_id},
                  {"signer_fingerprint", c.manifest.signer_fingerprint.hex()},
                  {"content_hash", c.manifest.content_hash.hex()},
                  {"signature", c.signature.hex()}});
    return kOk;
}

int cmd_unwrap(const std::string& path, const std::string& out_path,
               const TrustSourceFlags& source, bool force, const OutputFormat& format) {
    auto list = source.load();
    if (!list.ok()) return fail(format, list.error().first, list.error().second);
    auto bytes = read_file_bytes(path);
    if (!bytes) return fail(format, kNoInput, "cannot read " + path);
    auto container = read_container(*bytes);
    if (!container.ok()) {
        return fail(format, kMalformed, "malformed container: " + container.error().reason);
    }
    VerificationReport report = verify_container(container.value(), list.value());
    auto unwrapped = unwrap(container.value(), report, out_path, force);
    if (!unwrapped.ok()) {
        int code = unwrapped.error().kind == UnwrapErrorKind::RefusedUnverified
                       ? kRefusedUnverified
                       : kCantCreate;
        return fail(format, code, unwrapped.error().detail);
    }
    std::vector<kv::Entry> entries{{"out", unwrapped.value().written_path.string()},
                                   {"verdict", std::string(verdict_text(report.verdict))}};
    if (!unwrapped.value().warning.empty()) {
        entries.push_back({"warning", unwrapped.value().warning});
    }
    emit(format, std::move(entries));
    return kOk;
}

// ---- scan ------------------------------------------------------------------

int cmd_scan(const std::string& root, const std::string& mode_flag, std::uint64_t generate,
             std::uint64_t seed, int threads, const TrustSourceFlags& source,
             const OutputFormat& format) {
    if (generate > 0) {
        auto summary = scan::generate_corpus(root, generate, seed);
        if (!summary.ok()) return fail(format, kCantCreate, summary.error().detail);
        emit(format,
             {{"generated_files", std::to_string(summary.value().total_files)},
              {"real_files", std::to_string(summary.value().real_files)},
              {"expect_verified", std::to_string(summary.value().expect_verified)},
              {"expect_tampered", std::to_string(summary.value().expect_tampered)},
              {"expect_untrusted", std::to_string(summary.value().expect_untrusted)},
              {"expect_revoked", std::to_string(summary.value().expect_revoked)},
              {"expect_malformed", std::to_string(summary.value().expect_malformed)},
              {"trustlist", summary.value().trustlist_path.string()}});
        return kOk;
    }

    scan::ScanMode mode;
    if (mode_flag == "extension") {
        mode = scan::ScanMode::Extension;
    } else if (mode_flag == "full") {
        mode = scan::ScanMode::Full;
    } else {
        return fail(format, kUsage, "--mode must be extension or full");
    }

    std::optional<trust::TrustList> list;
    if (mode == scan::ScanMode::Full) {
        TrustSourceFlags effective = source;
        // Generated corpora carry their trust list at the root.
        if (effective.trustlist_path.empty() && effective.ca_url.empty()) {
            auto default_list = std::filesystem::path(root) / "trustlist.txt";
            if (std::filesystem::exists(default_list)) {
                effective.trustlist_path = default_list.string();
            }
        }
        auto loaded = effective.load();
        if (!loaded.ok()) return fail(format, loaded.error().first, loaded.error().second);
        list = std::move(loaded).value();
    }

    auto report = scan::scan_directory(root, mode, list ? &*list : nullptr, threads);
    if (!report.ok()) return fail(format, kNoInput, report.error().detail);
    const scan::ScanReport& r = report.value();
    std::vector<kv::Entry> entries{
        {"total_files", std::to_string(r.total_files)},
        {"real_extension_files", std::to_string(r.real_extension_files)},
        {"unreadable_entries", std::to_string(r.unreadable_entries)},
        {"extension_scan_seconds", fmt_double(r.extension_scan_seconds)},
    };
    if (mode == scan::ScanMode::Full) {
        entries.push_back({"verified", std::to_string(r.verified)});
        entries.push_back({"tampered", std::to_string(r.tampered)});
        entries.push_back({"untrusted", std::to_string(r.untrusted)});
        entries.push_back({"revoked", std::to_string(r.revoked)});
        entries.push_back({"malformed", std::to_string(r.malformed)});
        entries.push_back({"full_scan_seconds", fmt_double(r.full_scan_seconds)});
    }
    emit(format, std::move(entries));
    return kOk;
}

// ---- spoof-check -------------------------------------------------------------

int cmd_spoof_check(const std::string& rig_path, const std::string& pairs_path, double threshold,
                    const OutputFormat& format) {
    auto rig_bytes = read_file_bytes(rig_path);
    if (!rig_bytes) return fail(format, kNoInput, "cannot read " + rig_path);
    auto pair_bytes = read_file_bytes(pairs_path);
    if (!pair_bytes) return fail(format, kNoInput, "cannot read " + pairs_path);
    auto rig = geometry::parse_rig(to_string(*rig_bytes));
    if (!rig.ok()) return fail(format, kDataError, rig.error().detail);
    auto pairs = geometry::parse_correspondences(to_string(*pair_bytes));
    if (!pairs.ok()) return fail(format, kDataError, pairs.error().detail);
    auto report = geometry::classify_scene(pairs.value(), rig.value(), threshold);
    if (!report.ok()) return fail(format, kDataError, report.error().detail);
    const geometry::PlanarityReport& r = report.value();
    emit(format, {{"label", std::string(scene_label_text(r.label))},
                  {"normalized_score", fmt_double(r.normalized_score)},
                  {"rms_residual", fmt_double(r.rms_residual)},
                  {"threshold", fmt_double(r.threshold_used)},
                  {"points", std::to_string(r.points_3d.size())},
                  {"plane_normal",
                   fmt_double(r.plane_normal.x) + " " + fmt_double(r.plane_normal.y) + " " +
                       fmt_double(r.plane_normal.z)},
                  {"plane_offset", fmt_double(r.plane_offset)}});
    return kOk;
}

// ---- design-eval --------------------------------------------------------------

struct DesignEvalSetup {
    std::vector<sensing::SensingDesign> menu;
    sensing::ScenePopulation real_population;
    sensing::ScenePopulation spoof_population;
    std::vector<double> betas;
    std::uint64_t seed = 42;
    sensing::HarnessParams params;
};

DesignEvalSetup default_design_setup() {
    DesignEvalSetup setup;
    setup.real_population.kind = sensing::PopulationKind::Real;
    setup.spoof_population.kind = sensing::PopulationKind::Spoof;
    setup.betas = {0.0};
    setup.menu = {
        {"mono", sensing::DesignKind::Mono, 0.0, 0.0, 0.0, 1.0},
        {"stereo", sensing::DesignKind::Stereo, 1.0, 0.5, 0.0, 2.0},
        {"stereo-wide", sensing::DesignKind::StereoWide, 2.0, 0.5, 0.0, 2.5},
        {"depth-sensor", sensing::DesignKind::DepthSensor, 0.0, 0.0, 0.05, 4.0},
    };
    return setup;
}

bool apply_design_config(DesignEvalSetup& setup, const std::vector<kv::Entry>& fields,
                         std::string* error) {
    auto get_double = [&](const std::string& key, double& out) {
        const std::string* v = kv::find(fields, key);
        if (v) out = std::atof(v->c_str());
    };
    auto get_int = [&](const std::string& key, int& out) {
        const std::string* v = kv::find(fields, key);
        if (v) out = std::atoi(v->c_str());
    };
    get_double("real.depth_center", setup.real_population.depth_center);
    get_double("real.depth_halfwidth", setup.real_population.depth_halfwidth);
    get_int("real.points", setup.real_population.points_per_scene);
    get_double("spoof.plane_depth", setup.spoof_population.plane_depth);
    get_double("spoof.perturbation_sigma", setup.spoof_population.perturbation_sigma);
    get_int("spoof.points", setup.spoof_population.points_per_scene);
    get_int("train_scenes", setup.params.train_scenes_per_class);
    get_int("eval_scenes", setup.params.eval_scenes_per_class);
    if (const std::string* v = kv::find(fields, "seed")) {
        setup.seed = std::strtoull(v->c_str(), nullptr, 10);
    }

    if (const std::string* v = kv::find(fields, "beta.count")) {
        int count = std::atoi(v->c_str());
        setup.betas.clear();
        for (int i = 0; i < count; ++i) {
            const std::string* b = kv::find(fields, "beta." + std::to_string(i));
            if (!b) {
                *error = "beta." + std::to_string(i) + " missing";
                return false;
            }
            setup.betas.push_back(std::atof(b->c_str()));
        }
    }
    if (const std::string* v = kv::find(fields, "design.count")) {
        int count = std::atoi(v->c_str());
        setup.menu.clear();
        for (int i = 0; i < count; ++i) {
            std::string prefix = "design." + std::to_string(i) + ".";
            const std::string* name = kv::find(fields, prefix + "name");
            const std::string* kind_text = kv::find(fields, prefix + "kind");
            auto kind = kind_text ? sensing::parse_design_kind(*kind_text) : std::nullopt;
            if (!name || !kind || !kv::valid_key(*name)) {
                *error = prefix + "name/kind missing or invalid";
                return false;
            }
            sensing::SensingDesign design;
            design.name = *name;
            design.kind = *kind;
            get_double(prefix + "baseline", design.baseline);
            get_double(prefix + "pixel_noise", design.pixel_noise_sigma);
            get_double(prefix + "depth_noise", design.depth_noise_sigma);
            get_double(prefix + "cost", design.cost);
            setup.menu.push_back(std::move(design));
        }
    }
    return true;
}

int cmd_design_eval(const std::string& config_path, const std::string& designs_flag,
                    std::vector<double> betas, std::uint64_t seed, bool seed_set, int samples,
                    const OutputFormat& format) {
    DesignEvalSetup setup = default_design_setup();
    if (!config_path.empty()) {
        auto bytes = read_file_bytes(config_path);
        if (!bytes) return fail(format, kNoInput, "cannot read " + config_path);
        auto fields = kv::parse(to_string(*bytes));
        if (!fields.ok()) {
            return fail(format, kDataError, "config: " + fields.error().detail);
        }
        std::string error;
        if (!apply_design_config(setup, fields.value(), &error)) {
            return fail(format, kDataError, "config: " + error);
        }
    }
    if (!designs_flag.empty()) {
        // Comma-separated subset of the configured menu, by name.
        std::vector<sensing::SensingDesign> chosen;
        std::size_t pos = 0;
        while (pos <= designs_flag.size()) {
            std::size_t comma = designs_flag.find(',', pos);
            std::string name = designs_flag.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            auto it = std::find_if(setup.menu.begin(), setup.menu.end(),
                                   [&](const auto& d) { return d.name == name; });
            if (it == setup.menu.end()) {
                return fail(format, kUsage, "--designs: unknown design '" + name + "'");
            }
            chosen.push_back(*it);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        setup.menu = std::move(chosen);
    }
    if (!betas.empty()) setup.betas = std::move(betas);
    if (seed_set) setup.seed = seed;
    if (samples > 0) {
        setup.params.train_scenes_per_class = samples;
        setup.params.eval_scenes_per_class = samples;
    }

    // One evaluation per design; beta only reweights the cost term.
    std::vector<sensing::DesignEvaluation> evaluations;
    for (const auto& design : setup.menu) {
        auto evaluation = sensing::evaluate_design(design, setup.real_population,
                                                   setup.spoof_population, setup.seed,
                                                   setup.params);
        if (!evaluation.ok()) return fail(format, kDataError, evaluation.error().detail);
        evaluations.push_back(std::move(evaluation).value());
    }

    std::vector<kv::Entry> machine;
    for (std::size_t bi = 0; bi < setup.betas.size(); ++bi) {
        double beta = setup.betas[bi];
        const sensing::DesignEvaluation* best = nullptr;
        std::vector<sensing::ObjectiveReport> reports;
        for (const auto& evaluation : evaluations) {
            reports.push_back(sensing::report_for_beta(evaluation, beta));
        }
        for (std::size_t i = 0; i < evaluations.size(); ++i) {
            const auto& report = reports[i];
            const auto& evaluation = evaluations[i];
            if (!best || report.objective > sensing::report_for_beta(*best, beta).objective ||
                (report.objective == sensing::report_for_beta(*best, beta).objective &&
                 (evaluation.design.cost < best->design.cost ||
                  (evaluation.design.cost == best->design.cost &&
                   evaluation.design.name < best->design.name)))) {
                best = &evaluation;
            }
        }
        std::string bp = "beta." + std::to_string(bi);
        if (format.machine) {
            machine.push_back({bp, fmt_double(beta)});
            machine.push_back({bp + ".selected", best->design.name});
            for (const auto& report : reports) {
                std::string dp = bp + "." + report.design.name + ".";
                machine.push_back({dp + "j_real", fmt_double(report.j_real)});
                machine.push_back({dp + "j_spoof", fmt_double(report.j_spoof)});
                machine.push_back({dp + "cost_term", fmt_double(report.cost_term)});
                machine.push_back({dp + "objective", fmt_double(report.objective)});
                machine.push_back({dp + "auc", fmt_double(report.auc)});
            }
        } else {
            std::printf("beta = %s\n", fmt_double(beta).c_str());
            for (const auto& report : reports) {
                std::printf(
                    "  %-12s j_real=%9.4f j_spoof=%9.4f cost_term=%7.3f objective=%9.4f "
                    "auc=%.3f\n",
                    report.design.name.c_str(), report.j_real, report.j_spoof, report.cost_term,
                    report.objective, report.auc);
            }
            std::printf("  selected: %s\n", best->design.name.c_str());
        }
    }
    if (format.machine) emit(format, std::move(machine));
    return kOk;
}

// ---- demo-spoof -----------------------------------------------------------------

int cmd_demo_spoof(const std::string& config_path, const std::string& scenario_flag,
                   double screen_depth, double noise, double threshold, std::uint64_t seed,
                   const std::string& ca_url, const std::string& admin_token,
                   const std::string& trustlist, const OutputFormat& format) {
    capture::DemoConfig config;
    if (!config_path.empty()) {
        auto bytes = read_file_bytes(config_path);
        if (!bytes) return fail(format, kNoInput, "cannot read " + config_path);
        auto fields = kv::parse(to_string(*bytes));
        if (!fields.ok()) return fail(format, kDataError, fields.error().detail);
        auto get = [&](const char* key) { return kv::find(fields.value(), key); };
        if (const std::string* v = get("scenario")) {
            if (*v == "attack") config.scenario = capture::DemoScenario::RecaptureAttack;
            else if (*v == "unregistered")
                config.scenario = capture::DemoScenario::UnregisteredAttacker;
            else if (*v == "genuine") config.scenario = capture::DemoScenario::GenuineCapture;
            else return fail(format, kDataError, "scenario must be attack|unregistered|genuine");
        }
        if (const std::string* v = get("focal_px")) config.focal_px = std::atof(v->c_str());
        if (const std::string* v = get("baseline")) config.baseline = std::atof(v->c_str());
        if (const std::string* v = get("screen_depth")) {
            config.screen_depth = std::atof(v->c_str());
        }
        if (const std::string* v = get("pixel_noise_sigma")) {
            config.pixel_noise_sigma = std::atof(v->c_str());
        }
        if (const std::string* v = get("threshold")) {
            config.planarity_threshold = std::atof(v->c_str());
        }
        if (const std::string* v = get("seed")) {
            config.seed = std::strtoull(v->c_str(), nullptr, 10);
        }
        if (const std::string* v = get("ca_url")) config.ca_url = *v;
        if (const std::string* v = get("admin_token")) config.admin_token = *v;
        if (const std::string* v = get("trustlist")) config.trustlist_path = *v;
    }
    if (scenario_flag == "attack") config.scenario = capture::DemoScenario::RecaptureAttack;
    else if (scenario_flag == "unregistered")
        config.scenario = capture::DemoScenario::UnregisteredAttacker;
    else if (scenario_flag == "genuine") config.scenario = capture::DemoScenario::GenuineCapture;
    else if (!scenario_flag.empty()) {
        return fail(format, kUsage, "--scenario must be attack|unregistered|genuine");
    }
    if (screen_depth > 0) config.screen_depth = screen_depth;
    if (noise >= 0) config.pixel_noise_sigma = noise;
    if (threshold > 0) config.planarity_threshold = threshold;
    if (seed != 0) config.seed = seed;
    if (!ca_url.empty()) config.ca_url = ca_url;
    if (!admin_token.empty()) config.admin_token = admin_token;
    if (!trustlist.empty()) config.trustlist_path = trustlist;

    auto report = capture::run_spoof_demo(config);
    if (!report.ok()) return fail(format, kInternal, report.error().detail);
    const capture::DemoReport& r = report.value();
    std::vector<kv::Entry> entries{
        {"pki_verdict", std::string(verdict_text(r.pki.verdict))},
        {"claimed_label", std::string(scene_label_text(r.claimed_label))},
        {"geometry_label", std::string(scene_label_text(r.planarity.label))},
        {"normalized_score", fmt_double(r.planarity.normalized_score)},
        {"threshold", fmt_double(r.planarity.threshold_used)},
        {"deceived", r.deceived ? "true" : "false"},
    };
    if (!r.mitigation.empty()) entries.push_back({"mitigation", r.mitigation});
    emit(format, std::move(entries));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"provenance toolchain: signed .real containers, a CA trust list, "
                 "stereo anti-spoof checks, and a sensing-design harness"};
    app.require_subcommand(1);

    OutputFormat format;
    std::string format_flag = "human";
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format_flag, "output format")
            ->check(CLI::IsMember({"human", "machine"}));
    };

    // keygen
    auto* keygen = app.add_subcommand("keygen", "generate an Ed25519 device/CA keypair");
    std::string keygen_out = "realseal-key", keygen_seed;
    keygen->add_option("--out", keygen_out, "output path prefix");
    keygen->add_option("--seed", keygen_seed, "32-byte hex seed (deterministic)");
    add_format(keygen);

    // ca + subcommands
    auto* ca = app.add_subcommand("ca", "certificate-authority operations");
    ca->require_subcommand(1);

    auto* serve = ca->add_subcommand("serve", "run the CA HTTP service");
    std::string listen = "127.0.0.1:8754", admin_token, log_path = "ca.log",
                ca_key_path = "ca.key";
    serve->add_option("--listen", listen, "host:port");
    serve->add_option("--admin-token", admin_token, "admin credential")
        ->envname("REALSEAL_ADMIN_TOKEN")
        ->required();
    serve->add_option("--log", log_path, "append-only operation log path");
    serve->add_option("--ca-key", ca_key_path, "CA root private key path");

    auto* ca_register = ca->add_subcommand("register", "register a manufacturer public key");
    std::string reg_url, reg_name, reg_key;
    ca_register->add_option("--ca-url", reg_url)->envname("REALSEAL_CA_URL");
    ca_register->add_option("--name", reg_name, "manufacturer name")->required();
    ca_register->add_option("--key", reg_key, "public key file")->required();
    add_format(ca_register);

    auto* ca_approve = ca->add_subcommand("approve", "approve a pending registration");
    auto* ca_revoke = ca->add_subcommand("revoke", "revoke an active key");
    std::string admin_url, admin_fp, admin_tok, revoke_reason = "unspecified";
    for (CLI::App* cmd : {ca_approve, ca_revoke}) {
        cmd->add_option("--ca-url", admin_url)->envname("REALSEAL_CA_URL");
        cmd->add_option("--fingerprint", admin_fp)->required();
        cmd->add_option("--admin-token", admin_tok)->envname("REALSEAL_ADMIN_TOKEN")->required();
        add_format(cmd);
    }
    ca_revoke->add_option("--reason", revoke_reason);

    // sign
    auto* sign_cmd = app.add_subcommand("sign", "wrap a payload into a signed .real container");
    std::string sign_key, sign_payload, sign_out, sign_label = "3d", sign_rig, sign_pairs,
                sign_device = "realseal-cli", sign_time, sign_inner;
    double sign_threshold = geometry::kDefaultPlanarityThreshold;
    sign_cmd->add_option("--key", sign_key, "private key file")->required();
    sign_cmd->add_option("--payload", sign_payload, "payload file")->required();
    sign_cmd->add_option("--out", sign_out, "output .real path (default payload + .real)");
    sign_cmd->add_option("--scene-label", sign_label, "2d|3d|auto");
    sign_cmd->add_option("--rig", sign_rig, "rig file (for auto label)");
    sign_cmd->add_option("--pairs", sign_pairs, "correspondences file (for auto label)");
    sign_cmd->add_option("--device-id", sign_device);
    sign_cmd->add_option("--time", sign_time, "capture time YYYY-MM-DDThh:mm:ssZ");
    sign_cmd->add_option("--inner-format", sign_inner, "override payload extension");
    sign_cmd->add_option("--threshold", sign_threshold, "planarity threshold for auto label");
    add_format(sign_cmd);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "verify a .real container");
    std::string verify_path;
    TrustSourceFlags verify_source;
    verify_cmd->add_option("path", verify_path)->required();
    verify_source.attach(verify_cmd);
    add_format(verify_cmd);

    // inspect
    auto* inspect_cmd = app.add_subcommand("inspect", "structurally parse a container");
    std::string inspect_path;
    inspect_cmd->add_option("path", inspect_path)->required();
    add_format(inspect_cmd);

    // unwrap
    auto* unwrap_cmd = app.add_subcommand("unwrap", "extract the payload of a verified container");
    std::string unwrap_path, unwrap_out;
    bool unwrap_force = false;
    TrustSourceFlags unwrap_source;
    unwrap_cmd->add_option("path", unwrap_path)->required();
    unwrap_cmd->add_option("--out", unwrap_out, "destination (inner extension appended)")
        ->required();
    unwrap_cmd->add_flag("--force", unwrap_force, "extract even when not Verified (forensics)");
    unwrap_source.attach(unwrap_cmd);
    add_format(unwrap_cmd);

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "count and verify .real files under a directory");
    std::string scan_root, scan_mode = "extension";
    std::uint64_t scan_generate = 0, scan_seed = 1;
    int scan_threads = 0;
    TrustSourceFlags scan_source;
    scan_cmd->add_option("--root", scan_root)->required();
    scan_cmd->add_option("--mode", scan_mode, "extension|full");
    scan_cmd->add_option("--generate", scan_generate, "generate a mixed corpus of N files");
    scan_cmd->add_option("--seed", scan_seed, "corpus generator seed");
    scan_cmd->add_option("--threads", scan_threads, "verification worker threads");
    scan_source.attach(scan_cmd);
    add_format(scan_cmd);

    // spoof-check
    auto* spoof_cmd = app.add_subcommand("spoof-check", "planarity check on correspondences");
    std::string spoof_rig, spoof_pairs;
    double spoof_threshold = geometry::kDefaultPlanarityThreshold;
    spoof_cmd->add_option("--rig", spoof_rig)->required();
    spoof_cmd->add_option("--pairs", spoof_pairs)->required();
    spoof_cmd->add_option("--threshold", spoof_threshold);
    add_format(spoof_cmd);

    // design-eval
    auto* design_cmd = app.add_subcommand("design-eval", "score sensing designs against real and spoof scene populations");
    std::string design_config, design_names;
    std::vector<double> design_betas;
    std::uint64_t design_seed = 42;
    int design_samples = 0;
    design_cmd->add_option("--config", design_config, "experiment config file");
    design_cmd->add_option("--designs", design_names,
                           "comma-separated subset of the menu by name");
    design_cmd->add_option("--beta", design_betas, "cost weight(s); repeatable");
    auto* design_seed_opt = design_cmd->add_option("--seed", design_seed);
    design_cmd->add_option("--samples", design_samples, "train/eval scenes per class");
    add_format(design_cmd);

    // demo-spoof
    auto* demo_cmd = app.add_subcommand("demo-spoof", "run the recapture-attack demonstration");
    std::string demo_config, demo_scenario, demo_ca_url, demo_admin, demo_trustlist;
    double demo_depth = 0, demo_noise = -1, demo_threshold = 0;
    std::uint64_t demo_seed = 0;
    demo_cmd->add_option("--config", demo_config, "demo config file");
    demo_cmd->add_option("--scenario", demo_scenario, "attack|unregistered|genuine");
    demo_cmd->add_option("--screen-depth", demo_depth);
    demo_cmd->add_option("--noise", demo_noise, "pixel noise sigma");
    demo_cmd->add_option("--threshold", demo_threshold);
    demo_cmd->add_option("--seed", demo_seed);
    demo_cmd->add_option("--ca-url", demo_ca_url);
    demo_cmd->add_option("--admin-token", demo_admin);
    demo_cmd->add_option("--trustlist", demo_trustlist);
    add_format(demo_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    format.machine = format_flag == "machine";

    try {
        if (*keygen) return cmd_keygen(keygen_out, keygen_seed, format);
        if (*serve) return cmd_ca_serve(listen, admin_token, log_path, ca_key_path);
        if (*ca_register) return cmd_ca_register(reg_url, reg_name, reg_key, format);
        if (*ca_approve) {
            return cmd_ca_admin(true, admin_url, admin_fp, admin_tok, "", format);
        }
        if (*ca_revoke) {
            return cmd_ca_admin(false, admin_url, admin_fp, admin_tok, revoke_reason, format);
        }
        if (*sign_cmd) {
            return cmd_sign(sign_key, sign_payload, sign_out, sign_label, sign_rig, sign_pairs,
                            sign_device, sign_time, sign_inner, sign_threshold, format);
        }
        if (*verify_cmd) return cmd_verify(verify_path, verify_source, format);
        if (*inspect_cmd) return cmd_inspect(inspect_path, format);
        if (*unwrap_cmd) {
            return cmd_unwrap(unwrap_path, unwrap_out, unwrap_source, unwrap_force, format);
        }
        if (*scan_cmd) {
            return cmd_scan(scan_root, scan_mode, scan_generate, scan_seed, scan_threads,
                            scan_source, format);
        }
        if (*spoof_cmd) return cmd_spoof_check(spoof_rig, spoof_pairs, spoof_threshold, format);
        if (*design_cmd) {
            return cmd_design_eval(design_config, design_names, design_betas, design_seed,
                                   design_seed_opt->count() > 0, design_samples, format);
        }
        if (*demo_cmd) {
            return cmd_demo_spoof(demo_config, demo_scenario, demo_depth, demo_noise,
                                  demo_threshold, demo_seed, demo_ca_url, demo_admin,
                                  demo_trustlist, format);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kInternal;
    }
    return kUsage;
}
