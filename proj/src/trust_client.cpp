#include "realseal/trust_client.hpp"

#include <httplib.h>

#include "realseal/kv.hpp"

namespace realseal::trust {

namespace {

httplib::Client make_client(const std::string& base_url) {
    httplib::Client client(base_url);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(10, 0);
    return client;
}

Result<std::vector<kv::Entry>, ClientError> expect_kv(const httplib::Result& res,
                                                      const std::string& what, int want_status) {
    if (!res) {
        return ClientError{ClientErrorKind::Unreachable,
                           what + ": " + httplib::to_string(res.error())};
    }
    if (res->status != want_status) {
        std::string detail = what + " returned " + std::to_string(res->status);
        auto body = kv::parse(res->body);
        if (body.ok()) {
            if (const std::string* e = kv::find(body.value(), "error")) detail += " " + *e;
            if (const std::string* d = kv::find(body.value(), "detail")) {
                detail += " (" + *d + ")";
            }
        }
        return ClientError{ClientErrorKind::HttpError, detail};
    }
    auto body = kv::parse(res->body);
    if (!body.ok()) {
        return ClientError{ClientErrorKind::HttpError,
                           what + ": unparseable body: " + body.error().detail};
    }
    return std::move(body).value();
}

}  // namespace

Result<TrustList, ClientError> fetch_trust_list(const std::string& base_url,
                                                std::optional<crypto::PublicKey> pinned_root) {
    httplib::Client client(base_url);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(10, 0);
    auto res = client.Get("/v1/trustlist");
    if (!res) {
        return ClientError{ClientErrorKind::Unreachable,
                           "cannot reach " + base_url + ": " + httplib::to_string(res.error())};
    }
    if (res->status != 200) {
        return ClientError{ClientErrorKind::HttpError,
                           "GET /v1/trustlist returned " + std::to_string(res->status)};
    }
    auto list = validate_trust_list(res->body, pinned_root);
    if (!list.ok()) {
        return ClientError{ClientErrorKind::Rejected, list.error().detail};
    }
    return std::move(list).value();
}

Result<crypto::Fingerprint, ClientError> remote_register(const std::string& base_url,
                                                         const std::string& name,
                                                         const crypto::PublicKey& key) {
    auto client = make_client(base_url);
    auto res = client.Post("/v1/manufacturers",
                           kv::serialize({{"name", name}, {"public_key", key.hex()}}),
                           "text/plain");
    auto body = expect_kv(res, "POST /v1/manufacturers", 201);
    if (!body.ok()) return body.error();
    const std::string* fp_hex = kv::find(body.value(), "fingerprint");
    auto fp = fp_hex ? crypto::Fingerprint::from_hex(*fp_hex) : std::nullopt;
    if (!fp) {
        return ClientError{ClientErrorKind::HttpError, "response lacked a fingerprint"};
    }
    return *fp;
}

namespace {

Result<std::uint64_t, ClientError> remote_admin_op(const std::string& base_url,
                                                   const crypto::Fingerprint& fingerprint,
                                                   const std::string& admin_token,
                                                   const std::string& op,
                                                   const std::string& body_text) {
    auto client = make_client(base_url);
    httplib::Headers headers{{"X-Admin-Token", admin_token}};
    std::string path = "/v1/manufacturers/" + fingerprint.hex() + "/" + op;
    auto res = client.Post(path, headers, body_text, "text/plain");
    auto body = expect_kv(res, "POST " + path, 200);
    if (!body.ok()) return body.error();
    const std::string* version = kv::find(body.value(), "list_version");
    if (!version) {
        return ClientError{ClientErrorKind::HttpError, "response lacked list_version"};
    }
    return static_cast<std::uint64_t>(std::stoull(*version));
}

}  // namespace

Result<std::uint64_t, ClientError> remote_approve(const std::string& base_url,
                                                  const crypto::Fingerprint& fingerprint,
                                                  const std::string& admin_token) {
    return remote_admin_op(base_url, fingerprint, admin_token, "approve", "");
}

Result<std::uint64_t, ClientError> remote_revoke(const std::string& base_url,
                                                 const crypto::Fingerprint& fingerprint,
                                                 const std::string& admin_token,
                                                 const std::string& reason) {
    return remote_admin_op(base_url, fingerprint, admin_token, "revoke",
                           kv::serialize({{"reason", reason}}));
}

TrustClient::TrustClient(std::string base_url, ClientOptions options)
    : base_url_(std::move(base_url)), options_(options) {}

Result<std::shared_ptr<const TrustList>, ClientError> TrustClient::get(bool force_refresh) {
    std::lock_guard lock(mutex_);
    auto now = std::chrono::steady_clock::now();
    if (!force_refresh && cached_ && now - fetched_at_ < options_.cache_ttl) {
        return cached_;
    }
    auto fetched = fetch_trust_list(base_url_, options_.pinned_root);
    if (!fetched.ok()) {
        // Serve a stale-but-validated list rather than failing a verification
        // that could have completed offline.
        if (cached_) return cached_;
        return fetched.error();
    }
    cached_ = std::make_shared<const TrustList>(std::move(fetched).value());
    fetched_at_ = now;
    return cached_;
}

}  // namespace realseal::trust
