#include "realseal/container.hpp"

#include <cstring>

namespace realseal {

namespace {

void put_le(Bytes& out, std::uint64_t value, int width) {
    for (int i = 0; i < width; ++i) {
        out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
}

class ByteCursor {
public:
    explicit ByteCursor(std::span<const std::uint8_t> data) : data_(data) {}

    bool take(std::uint64_t n, std::span<const std::uint8_t>& out) {
        if (n > data_.size() - pos_) return false;  // no overflow: pos_ <= size
        out = data_.subspan(pos_, static_cast<std::size_t>(n));
        pos_ += static_cast<std::size_t>(n);
        return true;
    }

    bool take_le(int width, std::uint64_t& out) {
        std::span<const std::uint8_t> raw;
        if (!take(static_cast<std::uint64_t>(width), raw)) return false;
        out = 0;
        for (int i = width - 1; i >= 0; --i) {
            out = (out << 8) | raw[static_cast<std::size_t>(i)];
        }
        return true;
    }

    std::size_t remaining() const { return data_.size() - pos_; }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string_view verdict_text(Verdict verdict) {
    switch (verdict) {
        case Verdict::Verified: return "verified";
        case Verdict::Malformed: return "malformed";
        case Verdict::Tampered: return "tampered";
        case Verdict::UntrustedSigner: return "untrusted-signer";
        case Verdict::RevokedSigner: return "revoked-signer";
    }
    return "malformed";
}

Result<Bytes, WriteRefusal> write_container(std::span<const std::uint8_t> payload,
                                            std::string_view inner_format,
                                            const ProvenanceManifest& manifest,
                                            const crypto::Signature& signature) {
    auto canonical = canonicalize_manifest(manifest);
    if (!canonical.ok()) {
        return WriteRefusal{WriteRefusalKind::RefusedMandatoryField, canonical.error().detail};
    }
    if (!valid_inner_format(inner_format)) {
        return WriteRefusal{WriteRefusalKind::RefusedMandatoryField,
                            "inner_format must match [a-z0-9]{1,16}"};
    }
    if (inner_format != manifest.inner_format) {
        return WriteRefusal{WriteRefusalKind::RefusedMandatoryField,
                            "header inner_format disagrees with manifest"};
    }
    if (crypto::content_hash(payload) != manifest.content_hash) {
        return WriteRefusal{WriteRefusalKind::RefusedInconsistent,
                            "manifest content_hash does not match payload"};
    }
    const std::string& manifest_bytes = canonical.value();

    Bytes out;
    out.reserve(24 + inner_format.size() + payload.size() + manifest_bytes.size() +
                crypto::kSignatureBytes);
    out.insert(out.end(), kContainerMagic.begin(), kContainerMagic.end());
    out.push_back(kContainerVersion);
    out.push_back(static_cast<std::uint8_t>(manifest.scene_label));
    out.push_back(static_cast<std::uint8_t>(inner_format.size()));
    out.insert(out.end(), inner_format.begin(), inner_format.end());
    put_le(out, payload.size(), 8);
    out.insert(out.end(), payload.begin(), payload.end());
    put_le(out, manifest_bytes.size(), 4);
    out.insert(out.end(), manifest_bytes.begin(), manifest_bytes.end());
    put_le(out, signature.bytes.size(), 2);
    out.insert(out.end(), signature.bytes.begin(), signature.bytes.end());
    return out;
}

Result<RealContainer, ContainerParseError> read_container(std::span<const std::uint8_t> bytes) {
    ByteCursor cursor(bytes);

    std::span<const std::uint8_t> magic;
    if (!cursor.take(4, magic)) return ContainerParseError{"truncated"};
    if (std::memcmp(magic.data(), kContainerMagic.data(), 4) != 0) {
        return ContainerParseError{"magic"};
    }

    RealContainer c;
    std::span<const std::uint8_t> raw;
    if (!cursor.take(1, raw)) return ContainerParseError{"truncated"};
    c.version = raw[0];
    if (c.version != kContainerVersion) return ContainerParseError{"version"};

    if (!cursor.take(1, raw)) return ContainerParseError{"truncated"};
    if (raw[0] != static_cast<std::uint8_t>(SceneLabel::Label2D) &&
        raw[0] != static_cast<std::uint8_t>(SceneLabel::Label3D)) {
        return ContainerParseError{"label"};
    }
    c.scene_label = static_cast<SceneLabel>(raw[0]);

    std::uint64_t ext_len = 0;
    if (!cursor.take_le(1, ext_len)) return ContainerParseError{"truncated"};
    if (!cursor.take(ext_len, raw)) return ContainerParseError{"truncated"};
    c.inner_format.assign(raw.begin(), raw.end());
    if (!valid_inner_format(c.inner_format)) return ContainerParseError{"ext"};

    std::uint64_t payload_len = 0;
    if (!cursor.take_le(8, payload_len)) return ContainerParseError{"truncated"};
    if (!cursor.take(payload_len, raw)) return ContainerParseError{"truncated"};
    c.payload.assign(raw.begin(), raw.end());

    std::uint64_t manifest_len = 0;
    if (!cursor.take_le(4, manifest_len)) return ContainerParseError{"truncated"};
    if (!cursor.take(manifest_len, raw)) return ContainerParseError{"truncated"};
    c.manifest_bytes.assign(raw.begin(), raw.end());

    std::uint64_t sig_len = 0;
    if (!cursor.take_le(2, sig_len)) return ContainerParseError{"truncated"};
    if (sig_len != crypto::kSignatureBytes) return ContainerParseError{"signature-length"};
    if (!cursor.take(sig_len, raw)) return ContainerParseError{"truncated"};
    std::memcpy(c.signature.bytes.data(), raw.data(), crypto::kSignatureBytes);

    if (cursor.remaining() != 0) return ContainerParseError{"trailing"};

    auto manifest = parse_manifest(
        std::string_view(reinterpret_cast<const char*>(c.manifest_bytes.data()),
                         c.manifest_bytes.size()));
    if (!manifest.ok()) return ContainerParseError{"manifest"};
    c.manifest = std::move(manifest).value();

    if (c.manifest.scene_label != c.scene_label) return ContainerParseError{"label-mismatch"};
    if (c.manifest.inner_format != c.inner_format) return ContainerParseError{"ext-mismatch"};
    return c;
}

VerificationReport verify_container(const RealContainer& container,
                                    const trust::TrustList& trust_list) {
    VerificationReport report;

    // (1) structural invariants (a hand-built container may violate them even
    // if it never went through read_container)
    auto canonical = canonicalize_manifest(container.manifest);
    if (!canonical.ok() ||
        to_bytes(canonical.value()) != container.manifest_bytes ||
        container.version != kContainerVersion ||
        container.scene_label != container.manifest.scene_label ||
        container.inner_format != container.manifest.inner_format) {
        report.verdict = Verdict::Malformed;
        report.detail = "structural invariants violated";
        return report;
    }
    report.signer_fingerprint = container.manifest.signer_fingerprint;
    report.scene_label = container.manifest.scene_label;

    // (2) payload integrity
    if (crypto::content_hash(container.payload) != container.manifest.content_hash) {
        report.verdict = Verdict::Tampered;
        report.detail = "payload hash does not match manifest";
        return report;
    }

    // (3)-(5) signature under the trust-list key, then signer state
    trust::TrustDecision decision =
        trust::is_trusted(container.manifest.signer_fingerprint, trust_list);
    if (decision.kind == trust::TrustDecision::Kind::Unknown) {
        report.verdict = Verdict::UntrustedSigner;
        report.detail = "signer fingerprint not in trust list";
        return report;
    }
    if (!crypto::verify_signature(container.manifest_bytes, container.signature,
                                  decision.public_key)) {
        report.verdict = Verdict::Tampered;
        report.detail = "manifest signature does not verify";
        return report;
    }
    if (decision.kind == trust::TrustDecision::Kind::Revoked) {
        report.verdict = Verdict::RevokedSigner;
        report.detail = "signer key is revoked";
        return report;
    }
    report.verdict = Verdict::Verified;
    report.detail = "payload hash and manifest signature verify; signer active";
    return report;
}

VerificationReport verify_container_bytes(std::span<const std::uint8_t> bytes,
                                          const trust::TrustList& trust_list) {
    auto container = read_container(bytes);
    if (!container.ok()) {
        VerificationReport report;
        report.verdict = Verdict::Malformed;
        report.detail = container.error().reason;
        return report;
    }
    return verify_container(container.value(), trust_list);
}

Result<UnwrapResult, UnwrapError> unwrap(const RealContainer& container,
                                         const VerificationReport& report,
                                         const std::filesystem::path& destination,
                                         bool force) {
    if (report.verdict != Verdict::Verified && !force) {
        return UnwrapError{UnwrapErrorKind::RefusedUnverified,
                           "container verdict is " + std::string(verdict_text(report.verdict))};
    }
    std::filesystem::path out = destination;
    if (out.extension().string() != "." + container.inner_format) {
        out += "." + container.inner_format;
    }
    if (!write_file_bytes(out, container.payload)) {
        return UnwrapError{UnwrapErrorKind::IoError, "cannot write " + out.string()};
    }
    UnwrapResult result;
    result.written_path = out;
    if (report.verdict != Verdict::Verified) {
        result.warning = "payload extracted from a container with verdict " +
                         std::string(verdict_text(report.verdict));
    }
    return result;
}

}  // namespace realseal
