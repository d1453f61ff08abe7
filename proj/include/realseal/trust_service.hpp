#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "realseal/trust.hpp"

namespace realseal::trust {

enum class ServiceErrorKind {
    AlreadyRegistered,
    NotFound,
    Unauthorized,
    InvalidTransition,
    InvalidInput,
    IoError,
};

struct ServiceError {
    ServiceErrorKind kind;
    std::string detail;
};

struct ServiceConfig {
    std::string admin_token;
    std::filesystem::path log_path;     // append-only operation log, replayed at startup
    std::filesystem::path ca_key_path;  // CA root private key; created if absent
    std::function<std::int64_t()> clock;  // defaults to now_utc
};

// Published snapshot: parsed list plus its exact wire bytes. Readers grab the
// shared_ptr and never block mutations.
struct SignedTrustList {
    TrustList list;
    std::string bytes;
};

// The unified CA: vets manufacturer keys through a pending -> active ->
// revoked lifecycle and publishes a re-signed trust list on every change.
class TrustService {
public:
    static Result<std::unique_ptr<TrustService>, ServiceError> open(ServiceConfig config);

    Result<SignerRecord, ServiceError> register_manufacturer(const std::string& name,
                                                             const crypto::PublicKey& key);
    Result<std::shared_ptr<const SignedTrustList>, ServiceError> approve(
        const crypto::Fingerprint& fingerprint, const std::string& admin_token);
    Result<std::shared_ptr<const SignedTrustList>, ServiceError> revoke(
        const crypto::Fingerprint& fingerprint, const std::string& admin_token,
        const std::string& reason);

    std::shared_ptr<const SignedTrustList> current_list() const;
    const crypto::PublicKey& ca_public_key() const { return ca_keys_.public_key; }

    // Record lookup including Pending (registry view, not the published list).
    std::optional<SignerRecord> find_record(const crypto::Fingerprint& fingerprint) const;

private:
    TrustService() = default;

    Result<bool, ServiceError> apply(const std::string& op, const std::string& name,
                                     const crypto::PublicKey& key,
                                     const crypto::Fingerprint& fingerprint, std::int64_t ts,
                                     std::string* error_detail);
    void publish_locked();
    Result<bool, ServiceError> append_log(const std::vector<std::pair<std::string, std::string>>& fields);

    ServiceConfig config_;
    crypto::KeyPair ca_keys_;

    mutable std::mutex mutation_mutex_;
    std::map<std::string, SignerRecord> records_;  // fingerprint hex -> record
    std::uint64_t list_version_ = 0;
    std::int64_t list_issued_at_ = 0;
    std::shared_ptr<const SignedTrustList> snapshot_;
    mutable std::mutex snapshot_mutex_;
};

}  // namespace realseal::trust
