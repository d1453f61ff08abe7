#pragma once

#include <memory>
#include <string>
#include <thread>

#include "realseal/trust_service.hpp"

namespace realseal::trust {

// HTTP face of the CA:
//   POST /v1/manufacturers                      201 fingerprint | 400 | 409
//   POST /v1/manufacturers/{fp}/approve         200 list_version | 401 | 404 | 409
//   POST /v1/manufacturers/{fp}/revoke          200 list_version | 401 | 404 | 409
//   GET  /v1/trustlist                          200 signed trust list
//   GET  /v1/healthz                            200 "ok"
// Bodies are canonical kv text; admin calls carry X-Admin-Token.
class TrustHttpServer {
public:
    explicit TrustHttpServer(TrustService& service);
    ~TrustHttpServer();

    TrustHttpServer(const TrustHttpServer&) = delete;
    TrustHttpServer& operator=(const TrustHttpServer&) = delete;

    // Binds and serves on a background thread. port 0 picks a free port.
    bool start(const std::string& host, int port);
    // Serves on the calling thread until stop() or a signal handler fires.
    bool serve_blocking(const std::string& host, int port);
    void stop();

    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace realseal::trust
