#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "realseal/trust.hpp"

namespace realseal::trust {

enum class ClientErrorKind {
    Unreachable,
    HttpError,
    Rejected,  // fetched bytes failed validation
};

struct ClientError {
    ClientErrorKind kind;
    std::string detail;
};

struct ClientOptions {
    std::chrono::seconds cache_ttl{300};
    std::optional<crypto::PublicKey> pinned_root;
};

// Fetches /v1/trustlist, validates it, and caches the validated list for the
// configured time-to-live. Safe for concurrent readers; refreshes are
// serialized behind a mutex.
class TrustClient {
public:
    explicit TrustClient(std::string base_url, ClientOptions options = {});

    Result<std::shared_ptr<const TrustList>, ClientError> get(bool force_refresh = false);

private:
    std::string base_url_;
    ClientOptions options_;
    std::mutex mutex_;
    std::shared_ptr<const TrustList> cached_;
    std::chrono::steady_clock::time_point fetched_at_{};
};

// One-shot fetch without caching.
Result<TrustList, ClientError> fetch_trust_list(const std::string& base_url,
                                                std::optional<crypto::PublicKey> pinned_root =
                                                    std::nullopt);

// Client bindings for the CA's mutation endpoints.
Result<crypto::Fingerprint, ClientError> remote_register(const std::string& base_url,
                                                         const std::string& name,
                                                         const crypto::PublicKey& key);
Result<std::uint64_t, ClientError> remote_approve(const std::string& base_url,
                                                  const crypto::Fingerprint& fingerprint,
                                                  const std::string& admin_token);
Result<std::uint64_t, ClientError> remote_revoke(const std::string& base_url,
                                                 const crypto::Fingerprint& fingerprint,
                                                 const std::string& admin_token,
                                                 const std::string& reason);

}  // namespace realseal::trust
