#include "realseal/scan.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include "realseal/capture.hpp"
#include "realseal/rng.hpp"
#include "realseal/sensing.hpp"
#include "realseal/timeutil.hpp"
#include "realseal/trust_service.hpp"

namespace realseal::scan {

namespace {

namespace fs = std::filesystem;

bool has_real_suffix(const fs::path& path) {
    std::string name = path.filename().string();
    return name.size() > kRealExtension.size() &&
           name.ends_with(std::string(kRealExtension));
}

struct Walk {
    std::vector<fs::path> files;
    std::uint64_t unreadable = 0;
};

Walk walk_tree(const fs::path& root) {
    Walk walk;
    std::error_code ec;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        ++walk.unreadable;
        return walk;
    }
    fs::recursive_directory_iterator end;
    while (it != end) {
        std::error_code entry_ec;
        const fs::directory_entry& entry = *it;
        if (entry.is_regular_file(entry_ec) && !entry_ec) {
            walk.files.push_back(entry.path());
        } else if (entry_ec) {
            ++walk.unreadable;
        }
        it.increment(entry_ec);
        if (entry_ec) {
            ++walk.unreadable;
            break;
        }
    }
    std::sort(walk.files.begin(), walk.files.end());
    return walk;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Result<ScanReport, ScanError> scan_directory(const fs::path& root, ScanMode mode,
                                             const trust::TrustList* trust_list, int threads) {
    std::error_code ec;
    if (!fs::is_directory(root, ec) || ec) {
        return ScanError{root.string() + " is not a readable directory"};
    }
    if (mode == ScanMode::Full && trust_list == nullptr) {
        return ScanError{"full scan requires a validated trust list"};
    }

    ScanReport report;

    // Extension pass: the cheap filename-only sweep.
    auto ext_start = std::chrono::steady_clock::now();
    Walk walk = walk_tree(root);
    std::vector<const fs::path*> real_files;
    for (const fs::path& path : walk.files) {
        if (has_real_suffix(path)) real_files.push_back(&path);
    }
    report.extension_scan_seconds = seconds_since(ext_start);
    report.total_files = walk.files.size();
    report.real_extension_files = real_files.size();
    report.unreadable_entries = walk.unreadable;
    if (mode == ScanMode::Extension) return report;

    // Full pass: re-walk, then parse and verify each container. Work fans out
    // across threads; per-file verdicts land in slots indexed by sorted path
    // order so the merge is deterministic.
    auto full_start = std::chrono::steady_clock::now();
    Walk full_walk = walk_tree(root);
    std::vector<const fs::path*> to_verify;
    for (const fs::path& path : full_walk.files) {
        if (has_real_suffix(path)) to_verify.push_back(&path);
    }
    std::vector<Verdict> verdicts(to_verify.size(), Verdict::Malformed);

    unsigned worker_count = threads > 0 ? static_cast<unsigned>(threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    worker_count = std::min<unsigned>(worker_count, 8);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= to_verify.size()) return;
            auto bytes = read_file_bytes(*to_verify[i]);
            if (!bytes) {
                verdicts[i] = Verdict::Malformed;  // unreadable counts as malformed
                continue;
            }
            verdicts[i] = verify_container_bytes(*bytes, *trust_list).verdict;
        }
    };
    std::vector<std::thread> workers;
    for (unsigned w = 1; w < worker_count; ++w) workers.emplace_back(work);
    work();
    for (std::thread& w : workers) w.join();

    for (Verdict v : verdicts) {
        switch (v) {
            case Verdict::Verified: ++report.verified; break;
            case Verdict::Tampered: ++report.tampered; break;
            case Verdict::UntrustedSigner: ++report.untrusted; break;
            case Verdict::RevokedSigner: ++report.revoked; break;
            case Verdict::Malformed: ++report.malformed; break;
        }
    }
    report.full_scan_seconds = seconds_since(full_start);
    return report;
}

Result<CorpusSummary, ScanError> generate_corpus(const fs::path& root, std::uint64_t total_files,
                                                 std::uint64_t seed) {
    if (total_files < 20) return ScanError{"corpus needs at least 20 files"};
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) return ScanError{"cannot create " + root.string()};

    // Throwaway CA with one approved and one revoked device.
    fs::path ca_dir = root / "_ca";
    fs::create_directories(ca_dir);
    trust::ServiceConfig config;
    config.admin_token = "corpus-admin";
    config.log_path = ca_dir / "ca.log";
    config.ca_key_path = ca_dir / "ca.key";
    fs::remove(config.log_path);
    fs::remove(config.ca_key_path);
    std::int64_t fixed_now = 1767225600;  // 2026-01-01T00:00:00Z
    config.clock = [fixed_now] { return fixed_now; };
    auto service = trust::TrustService::open(std::move(config));
    if (!service.ok()) return ScanError{"corpus CA: " + service.error().detail};

    Rng rng(seed);
    auto make_device = [&](const std::string& id) {
        Bytes device_seed(32);
        for (auto& b : device_seed) b = static_cast<std::uint8_t>(rng.next_u64());
        return capture::DeviceIdentity::create(
            id, crypto::generate_keypair(device_seed).value());
    };
    capture::DeviceIdentity trusted = make_device("corpus-trusted");
    capture::DeviceIdentity revoked = make_device("corpus-revoked");
    capture::DeviceIdentity stranger = make_device("corpus-stranger");

    auto& ca = *service.value();
    if (!ca.register_manufacturer("Corpus Trusted", trusted.keypair.public_key).ok() ||
        !ca.approve(trusted.fingerprint, "corpus-admin").ok() ||
        !ca.register_manufacturer("Corpus Revoked", revoked.keypair.public_key).ok() ||
        !ca.approve(revoked.fingerprint, "corpus-admin").ok() ||
        !ca.revoke(revoked.fingerprint, "corpus-admin", "corpus fixture").ok()) {
        return ScanError{"corpus CA setup failed"};
    }

    CorpusSummary summary;
    summary.trustlist_path = root / "trustlist.txt";
    if (!write_file_bytes(summary.trustlist_path, to_bytes(ca.current_list()->bytes))) {
        return ScanError{"cannot write trust list"};
    }

    capture::CaptureConfig capture_config;
    capture_config.capture_time = fixed_now;

    sensing::ScenePopulation population;
    population.kind = sensing::PopulationKind::Real;
    population.points_per_scene = 16;

    std::uint64_t real_target = total_files / 10;
    for (std::uint64_t i = 0; i < total_files; ++i) {
        fs::path dir = root / ("d" + std::to_string(i % 16));
        fs::create_directories(dir);
        bool make_real = i < real_target;
        if (!make_real) {
            // Filler media files that only the full scan has to reject by name.
            Bytes noise(32 + rng.next_u64() % 64);
            for (auto& b : noise) b = static_cast<std::uint8_t>(rng.next_u64());
            fs::path path = dir / ("img" + std::to_string(i) + (i % 3 ? ".png" : ".jpg"));
            if (!write_file_bytes(path, noise)) return ScanError{"write " + path.string()};
            ++summary.total_files;
            continue;
        }

        fs::path path = dir / ("img" + std::to_string(i) + ".png.real");
        std::uint64_t flavor = i % 10;
        if (flavor == 8) {
            // Renamed junk: carries the extension, not the format.
            Bytes junk = to_bytes("not a container at all " + std::to_string(i));
            if (!write_file_bytes(path, junk)) return ScanError{"write " + path.string()};
            ++summary.expect_malformed;
        } else {
            const capture::DeviceIdentity* device = &trusted;
            if (flavor == 6) device = &stranger;
            if (flavor == 7) device = &revoked;
            capture_config.seed = derive_seed(seed, i);
            capture_config.inner_format = "png";
            sensing::Scene scene = sample_scene(population, capture_config.seed);
            auto shot =
                capture::capture(scene, *device, capture::LabelPolicy::Force3D, capture_config);
            if (!shot.ok()) return ScanError{"capture: " + shot.error().detail};
            Bytes bytes = std::move(shot).value().container_bytes;
            if (flavor == 9) {
                bytes[bytes.size() / 2] ^= 0x01;  // payload region: tampered
                ++summary.expect_tampered;
            } else if (flavor == 6) {
                ++summary.expect_untrusted;
            } else if (flavor == 7) {
                ++summary.expect_revoked;
            } else {
                ++summary.expect_verified;
            }
            if (!write_file_bytes(path, bytes)) return ScanError{"write " + path.string()};
        }
        ++summary.real_files;
        ++summary.total_files;
    }
    return summary;
}

}  // namespace realseal::scan
