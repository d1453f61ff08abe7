#include "realseal/trust_http.hpp"

#include <httplib.h>

#include "realseal/kv.hpp"

namespace realseal::trust {

namespace {

int status_for(ServiceErrorKind kind) {
    switch (kind) {
        case ServiceErrorKind::AlreadyRegistered: return 409;
        case ServiceErrorKind::NotFound: return 404;
        case ServiceErrorKind::Unauthorized: return 401;
        case ServiceErrorKind::InvalidTransition: return 409;
        case ServiceErrorKind::InvalidInput: return 400;
        case ServiceErrorKind::IoError: return 500;
    }
    return 500;
}

std::string_view error_name(ServiceErrorKind kind) {
    switch (kind) {
        case ServiceErrorKind::AlreadyRegistered: return "AlreadyRegistered";
        case ServiceErrorKind::NotFound: return "NotFound";
        case ServiceErrorKind::Unauthorized: return "Unauthorized";
        case ServiceErrorKind::InvalidTransition: return "InvalidTransition";
        case ServiceErrorKind::InvalidInput: return "InvalidInput";
        case ServiceErrorKind::IoError: return "IoError";
    }
    return "IoError";
}

void set_error(httplib::Response& res, const ServiceError& error) {
    res.status = status_for(error.kind);
    res.set_content(kv::serialize({{"error", std::string(error_name(error.kind))},
                                   {"detail", error.detail}}),
                    "text/plain");
}

}  // namespace

struct TrustHttpServer::Impl {
    explicit Impl(TrustService& service) : service(service) { route(); }

    void route() {
        server.Get("/v1/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok", "text/plain");
        });

        server.Get("/v1/trustlist", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(service.current_list()->bytes, "text/plain");
        });

        server.Post("/v1/manufacturers",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        auto fields = kv::parse(req.body);
                        if (!fields.ok()) {
                            set_error(res, {ServiceErrorKind::InvalidInput,
                                            "body: " + fields.error().detail});
                            return;
                        }
                        const std::string* name = kv::find(fields.value(), "name");
                        const std::string* key_hex = kv::find(fields.value(), "public_key");
                        auto key = key_hex ? crypto::PublicKey::from_hex(*key_hex) : std::nullopt;
                        if (!name || !key) {
                            set_error(res, {ServiceErrorKind::InvalidInput,
                                            "need name and public_key (64 hex chars)"});
                            return;
                        }
                        auto record = service.register_manufacturer(*name, *key);
                        if (!record.ok()) {
                            set_error(res, record.error());
                            return;
                        }
                        res.status = 201;
                        res.set_content(
                            kv::serialize({{"fingerprint", record.value().fingerprint.hex()},
                                           {"status", std::string(signer_status_text(
                                                          record.value().status))}}),
                            "text/plain");
                    });

        auto admin_op = [this](const httplib::Request& req, httplib::Response& res, bool approve) {
            auto fingerprint = crypto::Fingerprint::from_hex(req.matches[1].str());
            if (!fingerprint) {
                set_error(res, {ServiceErrorKind::InvalidInput, "fingerprint must be 32 hex"});
                return;
            }
            std::string token = req.get_header_value("X-Admin-Token");
            std::string reason;
            if (!approve) {
                auto fields = kv::parse(req.body);
                if (fields.ok()) {
                    const std::string* r = kv::find(fields.value(), "reason");
                    if (r) reason = *r;
                }
            }
            auto list = approve ? service.approve(*fingerprint, token)
                                : service.revoke(*fingerprint, token, reason);
            if (!list.ok()) {
                set_error(res, list.error());
                return;
            }
            res.status = 200;
            res.set_content(kv::serialize({{"list_version",
                                            std::to_string(list.value()->list.list_version)}}),
                            "text/plain");
        };

        server.Post(R"(/v1/manufacturers/([0-9a-f]+)/approve)",
                    [admin_op](const httplib::Request& req, httplib::Response& res) {
                        admin_op(req, res, true);
                    });
        server.Post(R"(/v1/manufacturers/([0-9a-f]+)/revoke)",
                    [admin_op](const httplib::Request& req, httplib::Response& res) {
                        admin_op(req, res, false);
                    });
    }

    TrustService& service;
    httplib::Server server;
};

TrustHttpServer::TrustHttpServer(TrustService& service) : impl_(new Impl(service)) {}

TrustHttpServer::~TrustHttpServer() { stop(); }

bool TrustHttpServer::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        if (port_ < 0) return false;
    } else {
        if (!impl_->server.bind_to_port(host, port)) return false;
        port_ = port;
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return true;
}

bool TrustHttpServer::serve_blocking(const std::string& host, int port) {
    port_ = port;
    return impl_->server.listen(host, port);
}

void TrustHttpServer::stop() {
    impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace realseal::trust
