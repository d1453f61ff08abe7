#include "realseal/manifest.hpp"

#include <algorithm>

#include "realseal/kv.hpp"
#include "realseal/timeutil.hpp"

namespace realseal {

namespace {

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        std::uint8_t c = static_cast<std::uint8_t>(s[i]);
        std::size_t len;
        std::uint32_t cp;
        if (c < 0x80) {
            i += 1;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            len = 2;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            len = 3;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t j = 1; j < len; ++j) {
            std::uint8_t cc = static_cast<std::uint8_t>(s[i + j]);
            if ((cc & 0xc0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3f);
        }
        // Overlongs, surrogates, out of range.
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
        i += len;
    }
    return true;
}

}  // namespace

bool valid_inner_format(std::string_view s) {
    if (s.empty() || s.size() > 16) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    });
}

Result<std::string, ManifestError> canonicalize_manifest(const ProvenanceManifest& m) {
    if (m.claim_version != 1) {
        return ManifestError{"claim_version must be 1"};
    }
    if (!valid_inner_format(m.inner_format)) {
        return ManifestError{"inner_format must match [a-z0-9]{1,16}"};
    }
    if (m.scene_label != SceneLabel::Label2D && m.scene_label != SceneLabel::Label3D) {
        return ManifestError{"scene_label must be 2D or 3D"};
    }
    if (m.device_id.size() > 64) {
        return ManifestError{"device_id exceeds 64 bytes"};
    }
    if (!valid_utf8(m.device_id)) {
        return ManifestError{"device_id is not valid UTF-8"};
    }
    // format_utc round-trips iff the timestamp lies in years 0001-9999.
    std::string when = format_utc(m.capture_time);
    if (!parse_utc(when)) {
        return ManifestError{"capture_time out of representable range"};
    }
    return kv::serialize({
        {"capture_time", when},
        {"claim_version", std::to_string(m.claim_version)},
        {"content_hash", m.content_hash.hex()},
        {"device_id", m.device_id},
        {"inner_format", m.inner_format},
        {"scene_label", std::string(scene_label_text(m.scene_label))},
        {"signer_fingerprint", m.signer_fingerprint.hex()},
    });
}

Result<ProvenanceManifest, ManifestError> parse_manifest(std::string_view bytes) {
    auto parsed = kv::parse(bytes);
    if (!parsed.ok()) {
        return ManifestError{"manifest does not parse: " + parsed.error().detail};
    }
    const auto& entries = parsed.value();
    if (entries.size() != 7) {
        return ManifestError{"manifest must carry exactly 7 fields"};
    }

    ProvenanceManifest m;
    const std::string* v = kv::find(entries, "claim_version");
    if (!v || *v != "1") return ManifestError{"claim_version missing or not 1"};
    m.claim_version = 1;

    v = kv::find(entries, "capture_time");
    if (!v) return ManifestError{"capture_time missing"};
    auto t = parse_utc(*v);
    if (!t) return ManifestError{"capture_time malformed"};
    m.capture_time = *t;

    v = kv::find(entries, "content_hash");
    if (!v) return ManifestError{"content_hash missing"};
    auto digest = crypto::Digest::from_hex(*v);
    if (!digest) return ManifestError{"content_hash malformed"};
    m.content_hash = *digest;

    v = kv::find(entries, "device_id");
    if (!v) return ManifestError{"device_id missing"};
    if (v->size() > 64 || !valid_utf8(*v)) return ManifestError{"device_id invalid"};
    m.device_id = *v;

    v = kv::find(entries, "inner_format");
    if (!v || !valid_inner_format(*v)) return ManifestError{"inner_format invalid"};
    m.inner_format = *v;

    v = kv::find(entries, "scene_label");
    if (!v) return ManifestError{"scene_label missing"};
    if (*v == "2D") m.scene_label = SceneLabel::Label2D;
    else if (*v == "3D") m.scene_label = SceneLabel::Label3D;
    else return ManifestError{"scene_label must be 2D or 3D"};

    v = kv::find(entries, "signer_fingerprint");
    if (!v) return ManifestError{"signer_fingerprint missing"};
    auto fp = crypto::Fingerprint::from_hex(*v);
    if (!fp) return ManifestError{"signer_fingerprint malformed"};
    m.signer_fingerprint = *fp;

    // Reject any non-canonical rendering (wrong order, duplicate handled above,
    // unescaped forms, alternate timestamp spellings).
    auto canonical = canonicalize_manifest(m);
    if (!canonical.ok() || canonical.value() != bytes) {
        return ManifestError{"manifest bytes are not canonical"};
    }
    return m;
}

Result<crypto::Signature, ManifestError> sign_manifest(const ProvenanceManifest& manifest,
                                                       const crypto::PrivateKey& key) {
    auto canonical = canonicalize_manifest(manifest);
    if (!canonical.ok()) return canonical.error();
    return crypto::sign(to_bytes(canonical.value()), key);
}

}  // namespace realseal
