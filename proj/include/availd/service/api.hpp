#pragma once

#include <memory>
#include <string>

#include "availd/service/service.hpp"

namespace availd::service {

/// HTTP status for a domain error, as used in API error bodies.
int status_for(const Error& e);
Json error_body(const Error& e);

/// /api/v1 over a Service, plus static console assets when configured.
class ApiServer {
public:
    explicit ApiServer(Service& service);
    ~ApiServer();

    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
    /// Throws StoreError when the address cannot be bound.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Requires a prior bind().
    void run();
    /// run() on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace availd::service
