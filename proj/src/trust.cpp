#include "realseal/trust.hpp"

#include <charconv>

#include "realseal/kv.hpp"
#include "realseal/timeutil.hpp"

namespace realseal::trust {

namespace {

constexpr std::string_view kSignatureKey = "ca_signature=";

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    if (s.empty() || (s.size() > 1 && s[0] == '0')) return std::nullopt;
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace

std::string_view signer_status_text(SignerStatus status) {
    switch (status) {
        case SignerStatus::Pending: return "pending";
        case SignerStatus::Active: return "active";
        case SignerStatus::Revoked: return "revoked";
    }
    return "pending";
}

std::optional<SignerStatus> parse_signer_status(std::string_view text) {
    if (text == "pending") return SignerStatus::Pending;
    if (text == "active") return SignerStatus::Active;
    if (text == "revoked") return SignerStatus::Revoked;
    return std::nullopt;
}

std::string serialize_trust_list_body(const TrustList& list) {
    std::vector<kv::Entry> entries;
    entries.push_back({"ca_public_key", list.ca_public_key.hex()});
    entries.push_back({"issued_at", format_utc(list.issued_at)});
    entries.push_back({"list_version", std::to_string(list.list_version)});
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const SignerRecord& r = list.entries[i];
        std::string prefix = "entry." + std::to_string(i) + ".";
        entries.push_back({prefix + "fingerprint", r.fingerprint.hex()});
        entries.push_back({prefix + "manufacturer", r.manufacturer_name});
        entries.push_back({prefix + "public_key", r.public_key.hex()});
        entries.push_back({prefix + "registered_at", format_utc(r.registered_at)});
        entries.push_back({prefix + "status", std::string(signer_status_text(r.status))});
        entries.push_back({prefix + "status_changed_at", format_utc(r.status_changed_at)});
    }
    return kv::serialize(std::move(entries));
}

std::string serialize_trust_list(const TrustList& list) {
    return serialize_trust_list_body(list) + std::string(kSignatureKey) +
           list.ca_signature.hex() + "\n";
}

Result<TrustList, TrustListError> validate_trust_list(
    std::string_view bytes, std::optional<crypto::PublicKey> pinned_root) {
    // Split off the trailing signature line.
    if (bytes.empty() || bytes.back() != '\n') {
        return TrustListError{TrustListErrorKind::RejectedFormat, "missing trailing newline"};
    }
    std::size_t last_line_start = bytes.rfind('\n', bytes.size() - 2);
    last_line_start = last_line_start == std::string_view::npos ? 0 : last_line_start + 1;
    std::string_view last_line = bytes.substr(last_line_start, bytes.size() - last_line_start - 1);
    if (!last_line.starts_with(kSignatureKey)) {
        return TrustListError{TrustListErrorKind::RejectedFormat, "missing ca_signature line"};
    }
    auto signature = crypto::Signature::from_hex(last_line.substr(kSignatureKey.size()));
    if (!signature) {
        return TrustListError{TrustListErrorKind::RejectedFormat, "ca_signature malformed"};
    }
    std::string_view body = bytes.substr(0, last_line_start);

    auto parsed = kv::parse(body);
    if (!parsed.ok()) {
        return TrustListError{TrustListErrorKind::RejectedFormat, parsed.error().detail};
    }
    const auto& fields = parsed.value();
    if (!kv::is_canonical(body)) {
        return TrustListError{TrustListErrorKind::RejectedFormat, "body is not canonical"};
    }
    if (kv::find(fields, "ca_signature")) {
        return TrustListError{TrustListErrorKind::RejectedFormat,
                              "ca_signature inside signed body"};
    }

    TrustList list;
    const std::string* v = kv::find(fields, "ca_public_key");
    if (!v) return TrustListError{TrustListErrorKind::RejectedFormat, "ca_public_key missing"};
    auto ca_key = crypto::PublicKey::from_hex(*v);
    if (!ca_key) {
        return TrustListError{TrustListErrorKind::RejectedFormat, "ca_public_key malformed"};
    }
    list.ca_public_key = *ca_key;

    if (pinned_root && *pinned_root != list.ca_public_key) {
        return TrustListError{TrustListErrorKind::RejectedSignature,
                              "embedded CA key does not match pinned root"};
    }
    if (!crypto::verify_signature(to_bytes(body), *signature, list.ca_public_key)) {
        return TrustListError{TrustListErrorKind::RejectedSignature,
                              "body signature does not verify"};
    }
    list.ca_signature = *signature;

    v = kv::find(fields, "list_version");
    auto version = v ? parse_u64(*v) : std::nullopt;
    if (!version) {
        return TrustListError{TrustListErrorKind::RejectedFormat, "list_version malformed"};
    }
    if (*version == 0) {
        return TrustListError{TrustListErrorKind::RejectedFormat, "list_version must be > 0"};
    }
    list.list_version = *version;

    v = kv::find(fields, "issued_at");
    auto issued = v ? parse_utc(*v) : std::nullopt;
    if (!issued) {
        return TrustListError{TrustListErrorKind::RejectedFormat, "issued_at malformed"};
    }
    list.issued_at = *issued;

    // Entries are numbered 0..n-1 with six fields each.
    std::size_t extra = fields.size() - 3;
    if (extra % 6 != 0) {
        return TrustListError{TrustListErrorKind::RejectedFormat, "unexpected field count"};
    }
    std::size_t count = extra / 6;
    for (std::size_t i = 0; i < count; ++i) {
        std::string prefix = "entry." + std::to_string(i) + ".";
        SignerRecord record;

        v = kv::find(fields, prefix + "fingerprint");
        auto fp = v ? crypto::Fingerprint::from_hex(*v) : std::nullopt;
        if (!fp) {
            return TrustListError{TrustListErrorKind::RejectedFormat,
                                  prefix + "fingerprint missing or malformed"};
        }
        record.fingerprint = *fp;

        v = kv::find(fields, prefix + "public_key");
        auto pk = v ? crypto::PublicKey::from_hex(*v) : std::nullopt;
        if (!pk) {
            return TrustListError{TrustListErrorKind::RejectedFormat,
                                  prefix + "public_key missing or malformed"};
        }
        record.public_key = *pk;

        v = kv::find(fields, prefix + "manufacturer");
        if (!v || v->empty() || v->size() > 128) {
            return TrustListError{TrustListErrorKind::RejectedFormat,
                                  prefix + "manufacturer missing or oversized"};
        }
        record.manufacturer_name = *v;

        v = kv::find(fields, prefix + "status");
        auto status = v ? parse_signer_status(*v) : std::nullopt;
        if (!status || *status == SignerStatus::Pending) {
            return TrustListError{TrustListErrorKind::RejectedFormat,
                                  prefix + "status invalid (pending entries never appear)"};
        }
        record.status = *status;

        v = kv::find(fields, prefix + "registered_at");
        auto reg = v ? parse_utc(*v) : std::nullopt;
        if (!reg) {
            return TrustListError{TrustListErrorKind::RejectedFormat,
                                  prefix + "registered_at malformed"};
        }
        record.registered_at = *reg;

        v = kv::find(fields, prefix + "status_changed_at");
        auto changed = v ? parse_utc(*v) : std::nullopt;
        if (!changed) {
            return TrustListError{TrustListErrorKind::RejectedFormat,
                                  prefix + "status_changed_at malformed"};
        }
        record.status_changed_at = *changed;

        if (!list.entries.empty() &&
            !(list.entries.back().fingerprint < record.fingerprint)) {
            return TrustListError{TrustListErrorKind::RejectedFormat,
                                  "entries out of fingerprint order"};
        }
        list.entries.push_back(std::move(record));
    }
    return list;
}

TrustDecision is_trusted(const crypto::Fingerprint& fingerprint, const TrustList& list) {
    for (const SignerRecord& r : list.entries) {
        if (r.fingerprint == fingerprint) {
            TrustDecision d;
            d.kind = r.status == SignerStatus::Active ? TrustDecision::Kind::Active
                                                      : TrustDecision::Kind::Revoked;
            d.public_key = r.public_key;
            return d;
        }
    }
    return TrustDecision{};
}

}  // namespace realseal::trust
