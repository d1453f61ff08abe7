#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "realseal/container.hpp"
#include "realseal/trust.hpp"

namespace realseal::scan {

enum class ScanMode {
    Extension,  // count .real-suffixed files; no parsing
    Full,       // additionally parse + verify every .real file
};

// Under a full scan, verified + tampered + untrusted + revoked + malformed
// equals real_extension_files; unreadable .real files count as malformed.
struct ScanReport {
    std::uint64_t total_files = 0;
    std::uint64_t real_extension_files = 0;
    std::uint64_t verified = 0;
    std::uint64_t tampered = 0;
    std::uint64_t untrusted = 0;
    std::uint64_t revoked = 0;
    std::uint64_t malformed = 0;
    std::uint64_t unreadable_entries = 0;  // directory entries we could not stat/open
    double extension_scan_seconds = 0;
    double full_scan_seconds = 0;
};

struct ScanError {
    std::string detail;
};

// Walks root, counting and (in Full mode) verifying. Verification fans out
// over worker threads; results merge in sorted path order.
Result<ScanReport, ScanError> scan_directory(const std::filesystem::path& root, ScanMode mode,
                                             const trust::TrustList* trust_list,
                                             int threads = 0);

// A deterministic mixed corpus for scan benchmarks: ~10% .real files spanning
// every verdict; writes trustlist.txt at the corpus root.
struct CorpusSummary {
    std::uint64_t total_files = 0;
    std::uint64_t real_files = 0;
    std::uint64_t expect_verified = 0;
    std::uint64_t expect_tampered = 0;
    std::uint64_t expect_untrusted = 0;
    std::uint64_t expect_revoked = 0;
    std::uint64_t expect_malformed = 0;
    std::filesystem::path trustlist_path;
};

Result<CorpusSummary, ScanError> generate_corpus(const std::filesystem::path& root,
                                                 std::uint64_t total_files, std::uint64_t seed);

}  // namespace realseal::scan
