#pragma once

// Minimal JSON-over-HTTP client for driving a running ApiServer.

#include <httplib.h>

#include <string>

#include "availd/core/json.hpp"

namespace availd::testing {

struct HttpReply {
    int status = 0;
    Json body;
    std::string raw;
};

class HttpClient {
public:
    explicit HttpClient(int port) : client_("127.0.0.1", port) {}

    HttpReply get(const std::string& path) { return wrap(client_.Get(path)); }

    HttpReply post(const std::string& path, const Json& body = Json::object(), const std::string& actor = "") {
        httplib::Headers headers;
        if (!actor.empty()) headers.emplace("X-Actor", actor);
        return wrap(client_.Post(path, headers, body.dump(), "application/json"));
    }

    HttpReply post_raw(const std::string& path, const std::string& body) {
        return wrap(client_.Post(path, body, "application/json"));
    }

private:
    static HttpReply wrap(const httplib::Result& r) {
        HttpReply out;
        if (!r) return out;
        out.status = r->status;
        out.raw = r->body;
        if (r->get_header_value("Content-Type").rfind("application/json", 0) == 0) out.body = Json::parse(r->body);
        return out;
    }

    httplib::Client client_;
};

}  // namespace availd::testing
