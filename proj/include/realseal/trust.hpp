#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "realseal/crypto.hpp"
#include "realseal/result.hpp"

namespace realseal::trust {

enum class SignerStatus {
    Pending,
    Active,
    Revoked,
};

std::string_view signer_status_text(SignerStatus status);
std::optional<SignerStatus> parse_signer_status(std::string_view text);

struct SignerRecord {
    crypto::Fingerprint fingerprint;
    crypto::PublicKey public_key;
    std::string manufacturer_name;  // UTF-8, at most 128 bytes
    SignerStatus status = SignerStatus::Pending;
    std::int64_t registered_at = 0;
    std::int64_t status_changed_at = 0;

    bool operator==(const SignerRecord&) const = default;
};

// CA-signed registry snapshot. Entries are Active/Revoked records sorted by
// fingerprint; Pending registrations never appear.
//
// Wire format: canonical kv body (ca_public_key, entry.N.*, issued_at,
// list_version) followed by one trailing "ca_signature=<hex>" line whose
// signature covers exactly the body bytes.
struct TrustList {
    std::uint64_t list_version = 0;
    std::int64_t issued_at = 0;
    crypto::PublicKey ca_public_key;
    std::vector<SignerRecord> entries;
    crypto::Signature ca_signature;

    bool operator==(const TrustList&) const = default;
};

std::string serialize_trust_list_body(const TrustList& list);
std::string serialize_trust_list(const TrustList& list);

enum class TrustListErrorKind {
    RejectedSignature,
    RejectedFormat,
};

struct TrustListError {
    TrustListErrorKind kind;
    std::string detail;
};

// Parses and authenticates a served trust list. When pinned_root is given the
// embedded CA key must match it; otherwise the embedded key is trusted as-is.
// Rejects version 0, unsorted or duplicate entries, and Pending statuses.
Result<TrustList, TrustListError> validate_trust_list(
    std::string_view bytes, std::optional<crypto::PublicKey> pinned_root = std::nullopt);

struct TrustDecision {
    enum class Kind { Active, Revoked, Unknown };
    Kind kind = Kind::Unknown;
    crypto::PublicKey public_key;  // populated for Active and Revoked
};

TrustDecision is_trusted(const crypto::Fingerprint& fingerprint, const TrustList& list);

}  // namespace realseal::trust
