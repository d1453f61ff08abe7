#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "realseal/crypto.hpp"
#include "realseal/result.hpp"

namespace realseal {

enum class SceneLabel : std::uint8_t {
    Label2D = 0x02,
    Label3D = 0x03,
};

inline std::string_view scene_label_text(SceneLabel label) {
    return label == SceneLabel::Label2D ? "2D" : "3D";
}

// The signed claim record bound to a capture. All fields are mandatory; the
// canonical serialization (kv grammar, keys sorted bytewise) is the exact
// byte sequence that gets signed.
struct ProvenanceManifest {
    std::uint32_t claim_version = 1;
    crypto::Fingerprint signer_fingerprint;
    crypto::Digest content_hash;
    std::string inner_format;       // [a-z0-9]{1,16}
    SceneLabel scene_label = SceneLabel::Label3D;
    std::int64_t capture_time = 0;  // UTC seconds
    std::string device_id;          // UTF-8, at most 64 bytes

    bool operator==(const ProvenanceManifest&) const = default;
};

struct ManifestError {
    std::string detail;
};

bool valid_inner_format(std::string_view s);

// Validates every invariant, then emits the canonical bytes.
Result<std::string, ManifestError> canonicalize_manifest(const ProvenanceManifest& manifest);

// Strict inverse: input must be canonical and carry exactly the seven keys.
Result<ProvenanceManifest, ManifestError> parse_manifest(std::string_view bytes);

// Signature over the canonical manifest bytes.
Result<crypto::Signature, ManifestError> sign_manifest(const ProvenanceManifest& manifest,
                                                       const crypto::PrivateKey& key);

}  // namespace realseal
