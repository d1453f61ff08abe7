#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "realseal/bytes.hpp"
#include "realseal/manifest.hpp"
#include "realseal/result.hpp"
#include "realseal/trust.hpp"

namespace realseal {

// On-disk `.real` layout, little-endian multi-byte integers:
//
//   magic "REAL" (4) | version 0x01 (1) | scene_label 0x02|0x03 (1)
//   | inner_ext_len (1) | inner_ext | payload_len (8) | payload
//   | manifest_len (4) | manifest bytes | signature_len (2) | signature
//
// Header scene_label and inner_ext must agree with the embedded manifest,
// and the manifest bytes must be canonical.

inline constexpr std::uint8_t kContainerVersion = 0x01;
inline constexpr std::string_view kContainerMagic = "REAL";
inline constexpr std::string_view kRealExtension = ".real";

struct RealContainer {
    std::uint8_t version = kContainerVersion;
    SceneLabel scene_label = SceneLabel::Label3D;
    std::string inner_format;
    Bytes payload;
    Bytes manifest_bytes;
    ProvenanceManifest manifest;  // parsed view of manifest_bytes
    crypto::Signature signature;

    bool operator==(const RealContainer&) const = default;
};

enum class Verdict {
    Verified,
    Malformed,
    Tampered,
    UntrustedSigner,
    RevokedSigner,
};

std::string_view verdict_text(Verdict verdict);

struct VerificationReport {
    Verdict verdict = Verdict::Malformed;
    std::optional<crypto::Fingerprint> signer_fingerprint;
    std::optional<SceneLabel> scene_label;
    std::string detail;
};

enum class WriteRefusalKind {
    RefusedInconsistent,   // manifest.content_hash != hash(payload)
    RefusedMandatoryField, // missing/invalid manifest or header field
};

struct WriteRefusal {
    WriteRefusalKind kind;
    std::string detail;
};

Result<Bytes, WriteRefusal> write_container(std::span<const std::uint8_t> payload,
                                            std::string_view inner_format,
                                            const ProvenanceManifest& manifest,
                                            const crypto::Signature& signature);

struct ContainerParseError {
    std::string reason;  // "magic", "truncated", "label-mismatch", ...
};

// Structural parse only; no signature or trust checks.
Result<RealContainer, ContainerParseError> read_container(std::span<const std::uint8_t> bytes);

// Fixed verdict order: structure, payload hash, signature, signer presence,
// signer status. The trust list must already be validated (see trust::).
VerificationReport verify_container(const RealContainer& container,
                                    const trust::TrustList& trust_list);

// Convenience: parse + verify, folding parse failure into a Malformed report.
VerificationReport verify_container_bytes(std::span<const std::uint8_t> bytes,
                                          const trust::TrustList& trust_list);

enum class UnwrapErrorKind {
    RefusedUnverified,
    IoError,
};

struct UnwrapError {
    UnwrapErrorKind kind;
    std::string detail;
};

struct UnwrapResult {
    std::filesystem::path written_path;
    std::string warning;  // nonempty when forced past a non-Verified verdict
};

Result<UnwrapResult, UnwrapError> unwrap(const RealContainer& container,
                                         const VerificationReport& report,
                                         const std::filesystem::path& destination,
                                         bool force = false);

}  // namespace realseal
