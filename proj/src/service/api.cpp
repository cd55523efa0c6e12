#include "availd/service/api.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <functional>
#include <thread>

namespace availd::service {

namespace {

struct Reply {
    int status = 200;
    Json body;
    std::string text;  // sent as text/plain instead of body when non-empty
};

using Handler = std::function<Reply(const httplib::Request&)>;

template <class T>
T decode(const Json& j, const char* what) {
    try {
        return j.get<T>();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        rethrow_as_validation(e, what);
    }
}

Json body_of(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        auto j = Json::parse(req.body);
        if (!j.is_object()) throw ValidationError("request body must be a JSON object");
        return j;
    } catch (const Json::parse_error& e) {
        throw ValidationError("request body is not valid JSON", {e.what()});
    }
}

std::string actor_of(const httplib::Request& req) {
    auto actor = req.get_header_value("X-Actor");
    if (actor.empty()) throw ValidationError("missing X-Actor header");
    return actor;
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
}

template <class T>
Json list(const std::vector<T>& items) {
    Json out = Json::array();
    for (const auto& i : items) out.push_back(i);
    return out;
}

void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

int status_for(const Error& e) {
    const auto& c = e.code();
    if (c == "validation_error" || c == "parse_error") return 400;
    if (c == "not_found") return 404;
    if (c == "unknown_monitor") return 422;
    if (c == "state_machine_error" || c == "workflow_error" || c == "scheduling_error" ||
        c == "independence_violation" || c == "authorization_order_error") {
        return 409;
    }
    if (c == "store_error") return 503;
    return 500;
}

Json error_body(const Error& e) { return Json{{"code", e.code()}, {"message", e.what()}, {"details", e.details()}}; }

struct ApiServer::Impl {
    Service& svc;
    httplib::Server server;
    std::thread thread;
    bool bound = false;

    explicit Impl(Service& s) : svc(s) {}

    metrics::TimeInterval period_of(const httplib::Request& req) const {
        const auto def = svc.default_period();
        const auto from = query(req, "from");
        const auto to = query(req, "to");
        return {from ? parse_rfc3339(*from) : def.start(), to ? parse_rfc3339(*to) : def.end()};
    }

    httplib::Server::Handler wrap(Handler h) {
        return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
            try {
                auto r = h(req);
                if (!r.text.empty()) {
                    res.status = r.status;
                    res.set_content(r.text, "text/plain; charset=utf-8");
                } else {
                    send(res, r.status, r.body);
                }
            } catch (const Error& e) {
                send(res, status_for(e), error_body(e));
            } catch (const std::exception& e) {
                spdlog::error("{} {} failed: {}", req.method, req.path, e.what());
                send(res, 500, Json{{"code", "internal_error"}, {"message", e.what()}, {"details", Json::array()}});
            }
        };
    }

    void get(const std::string& pattern, Handler h) { server.Get(pattern, wrap(std::move(h))); }
    void post(const std::string& pattern, Handler h) { server.Post(pattern, wrap(std::move(h))); }

    void routes();
};

void ApiServer::Impl::routes() {
    using namespace std::string_literals;
    auto& engine = svc.engine();
    const auto& config = svc.config();
    const std::string id = "([^/]+)";
    const std::string v1 = "/api/v1";

    get(v1 + "/health", [&](const httplib::Request&) {
        return Reply{200, Json{{"status", "ok"}, {"last_seq", engine.last_seq()}}, {}};
    });

    // Products and availability.
    get(v1 + "/products", [&](const httplib::Request&) {
        Json out = Json::array();
        for (const auto& p : config.products) {
            Json monitors = Json::array();
            for (const auto& m : config.monitors) {
                if (m.product_id == p.id) monitors.push_back(m.monitor_id);
            }
            out.push_back(Json{{"id", p.id},
                               {"name", p.name},
                               {"sla_target_percent", p.sla_target_percent},
                               {"schedule", p.schedule},
                               {"monitors", monitors}});
        }
        return Reply{200, out, {}};
    });
    get(v1 + "/products/" + id + "/availability", [&](const httplib::Request& req) {
        const std::string product = req.matches[1];
        if (config.product(product) == nullptr) throw NotFoundError("unknown product '" + product + "'");
        const auto view = parse_view(query(req, "view").value_or("percent"));
        return Reply{200, svc.availability(product, period_of(req), view), {}};
    });
    get(v1 + "/dashboard", [&](const httplib::Request&) {
        const auto snap = svc.dashboard();
        if (!snap) throw StoreError("dashboard not computed yet");
        return Reply{200, to_json(*snap), {}};
    });

    // Alerts.
    post(v1 + "/alerts", [&](const httplib::Request& req) {
        const auto event = decode<alerts::AlertEvent>(body_of(req), "alert");
        const auto result = engine.ingest_alert(event);
        if (result.kind == alerts::Classification::Rejected) {
            auto body = error_body(UnknownMonitorError(event.monitor_id));
            body["classification"] = alerts::to_string(result.kind);
            body["seq"] = result.seq;
            return Reply{422, body, {}};
        }
        return Reply{202, store::to_json(result), {}};
    });
    get(v1 + "/alerts/counters", [&](const httplib::Request&) {
        return Reply{200, engine.read([](const store::State& s) { return Json(s.alert_ledger().counters()); }), {}};
    });

    // Incidents.
    get(v1 + "/incidents", [&](const httplib::Request& req) {
        const auto state = query(req, "state");
        std::optional<incident::State> filter;
        if (state) filter = incident::parse_state(*state);
        Json out = Json::array();
        for (const auto& i : engine.read([](const store::State& s) { return s.incident_list(); })) {
            if (!filter || i.state == *filter) out.push_back(i);
        }
        return Reply{200, out, {}};
    });
    get(v1 + "/incidents/" + id, [&](const httplib::Request& req) {
        return Reply{200, engine.read([&](const store::State& s) { return Json(s.incident(req.matches[1].str())); }), {}};
    });
    post(v1 + "/incidents", [&](const httplib::Request& req) {
        auto details = decode<incident::IncidentDetails>(body_of(req), "incident");
        details.actor = actor_of(req);
        return Reply{201, engine.open_incident(details), {}};
    });
    post(v1 + "/incidents/" + id + "/transition", [&](const httplib::Request& req) {
        const auto body = body_of(req);
        const auto to = incident::parse_state(required<std::string>(body, "to"));
        const auto fields = decode<incident::TransitionFields>(body.value("fields", body), "fields");
        return Reply{200, engine.transition_incident(req.matches[1], to, fields, actor_of(req)), {}};
    });
    post(v1 + "/incidents/" + id + "/close", [&](const httplib::Request& req) {
        const auto r = engine.close_incident(req.matches[1], actor_of(req));
        return Reply{200, Json{{"incident", r.incident}, {"outage_record", r.record}, {"problem", r.problem}}, {}};
    });

    // Outage records.
    get(v1 + "/outage-records", [&](const httplib::Request& req) {
        const auto state = query(req, "state");
        std::optional<records::RecordState> filter;
        if (state) filter = records::parse_record_state(*state);
        Json out = Json::array();
        for (const auto& r : engine.read([](const store::State& s) { return store::State::values(s.records()); })) {
            if (!filter || r.state == *filter) out.push_back(r);
        }
        return Reply{200, out, {}};
    });
    get(v1 + "/outage-records/" + id, [&](const httplib::Request& req) {
        return Reply{200, engine.read([&](const store::State& s) { return Json(s.record(req.matches[1].str())); }), {}};
    });
    post(v1 + "/outage-records/" + id + "/review", [&](const httplib::Request& req) {
        const auto body = body_of(req);
        const auto decision = records::parse_review_decision(required<std::string>(body, "decision"));
        const auto edits = decode<records::ReviewEdits>(body.value("edits", Json::object()), "edits");
        const auto record =
            engine.review_outage(req.matches[1], decision, edits, actor_of(req), body.value("note", ""));
        return Reply{200, record, {}};
    });

    // Problems.
    get(v1 + "/problems", [&](const httplib::Request& req) {
        const auto state = query(req, "state");
        std::optional<problem::ProblemState> filter;
        if (state) filter = problem::parse_problem_state(*state);
        Json out = Json::array();
        for (const auto& t : engine.read([](const store::State& s) { return store::State::values(s.problems()); })) {
            if (!filter || t.state == *filter) out.push_back(t);
        }
        return Reply{200, out, {}};
    });
    get(v1 + "/problems/" + id, [&](const httplib::Request& req) {
        return Reply{200, engine.read([&](const store::State& s) { return Json(s.problem(req.matches[1].str())); }), {}};
    });
    get(v1 + "/problems/" + id + "/report", [&](const httplib::Request& req) {
        const auto text = engine.read(
            [&](const store::State& s) { return problem::render_rca_report(s.problem(req.matches[1].str())); });
        return Reply{200, {}, text};
    });
    post(v1 + "/problems/" + id + "/rca", [&](const httplib::Request& req) {
        const auto body = body_of(req);
        actor_of(req);
        const auto rca = decode<problem::RcaDocument>(body.value("rca", body), "rca");
        return Reply{200, engine.submit_rca(req.matches[1], rca), {}};
    });
    post(v1 + "/problems/" + id + "/review", [&](const httplib::Request& req) {
        const auto body = body_of(req);
        const auto decision = problem::parse_rca_decision(required<std::string>(body, "decision"));
        return Reply{200, engine.review_rca(req.matches[1], actor_of(req), decision, body.value("note", "")), {}};
    });

    // Releases.
    get(v1 + "/releases", [&](const httplib::Request&) {
        return Reply{200, list(engine.read([](const store::State& s) { return store::State::values(s.releases()); })), {}};
    });
    get(v1 + "/releases/calendar", [&](const httplib::Request&) {
        return Reply{200,
                     engine.read([](const store::State& s) {
                         return change::export_release_calendar(store::State::values(s.releases()));
                     }),
                     {}};
    });
    get(v1 + "/releases/" + id, [&](const httplib::Request& req) {
        return Reply{200, engine.read([&](const store::State& s) { return Json(s.release(req.matches[1].str())); }), {}};
    });
    post(v1 + "/releases", [&](const httplib::Request& req) {
        const auto body = body_of(req);
        const auto actor = actor_of(req);
        const auto release = engine.create_release(
            required<std::string>(body, "name"), body.value("pbi_ids", std::vector<std::string>{}),
            required<metrics::TimeInterval>(body, "target_window"),
            decode<std::vector<change::ChecklistItem>>(body.value("prr", Json::array()), "prr"), actor);
        return Reply{201, release, {}};
    });
    post(v1 + "/releases/" + id + "/prr", [&](const httplib::Request& req) {
        const auto body = body_of(req);
        return Reply{200, engine.run_prr(req.matches[1], body.value("updates", Json::object()), actor_of(req)), {}};
    });
    post(v1 + "/releases/" + id + "/approve", [&](const httplib::Request& req) {
        return Reply{200, engine.approve_release(req.matches[1], actor_of(req)), {}};
    });
    post(v1 + "/releases/" + id + "/deploy", [&](const httplib::Request& req) {
        return Reply{200, engine.deploy_release(req.matches[1], actor_of(req)), {}};
    });
    post(v1 + "/releases/" + id + "/cancel", [&](const httplib::Request& req) {
        return Reply{200, engine.cancel_release(req.matches[1], actor_of(req)), {}};
    });

    // Changes.
    get(v1 + "/changes", [&](const httplib::Request&) {
        return Reply{200, list(engine.read([](const store::State& s) { return store::State::values(s.changes()); })), {}};
    });
    get(v1 + "/changes/review-queue", [&](const httplib::Request& req) {
        const auto day = query(req, "day");
        const auto at = day ? parse_rfc3339(*day) : engine.now();
        const auto changes = engine.read([](const store::State& s) { return store::State::values(s.changes()); });
        return Reply{200, list(change::daily_review_queue(changes, at)), {}};
    });
    get(v1 + "/changes/correlation", [&](const httplib::Request&) {
        const auto window = Seconds{config.correlation_window_hours * kSecondsPerHour};
        const auto pairs = engine.read([&](const store::State& s) {
            return change::change_incident_correlation(store::State::values(s.changes()), s.incident_list(), window);
        });
        Json out = Json::array();
        for (const auto& p : pairs) out.push_back(Json{{"change_id", p.change_id}, {"incident_id", p.incident_id}});
        return Reply{200, out, {}};
    });
    get(v1 + "/changes/" + id, [&](const httplib::Request& req) {
        return Reply{200, engine.read([&](const store::State& s) { return Json(s.change(req.matches[1].str())); }), {}};
    });
    post(v1 + "/changes", [&](const httplib::Request& req) {
        actor_of(req);
        return Reply{201, engine.request_change(decode<change::ChangeRequest>(body_of(req), "change")), {}};
    });
    post(v1 + "/changes/" + id + "/review", [&](const httplib::Request& req) {
        const auto body = body_of(req);
        const auto decision = change::parse_change_decision(required<std::string>(body, "decision"));
        return Reply{200, engine.review_change(req.matches[1], decision, actor_of(req)), {}};
    });
    post(v1 + "/changes/" + id + "/execute", [&](const httplib::Request& req) {
        return Reply{200, engine.execute_change(req.matches[1], actor_of(req)), {}};
    });
    post(v1 + "/changes/" + id + "/verify", [&](const httplib::Request& req) {
        return Reply{200, engine.verify_change(req.matches[1], actor_of(req)), {}};
    });

    // Reports.
    get(v1 + "/reports/executive", [&](const httplib::Request& req) {
        const auto report = svc.executive_report(period_of(req));
        const auto format = query(req, "format").value_or("json");
        if (format == "text") return Reply{200, {}, render_executive_text(report)};
        if (format != "json") throw ValidationError("format must be 'json' or 'text'");
        return Reply{200, report, {}};
    });

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto code = res.status == 404 ? "not_found" : "http_error";
        send(res, res.status, Json{{"code", code}, {"message", req.method + " " + req.path}, {"details", Json::array()}});
    });

    if (config.static_dir && !server.set_mount_point("/", *config.static_dir)) {
        throw ValidationError("static_dir '" + *config.static_dir + "' is not a readable directory");
    }
}

ApiServer::ApiServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
    impl_->routes();
    // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw StoreError("cannot bind " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound;
}

void ApiServer::run() {
    if (!impl_->bound) throw StoreError("server is not bound");
    impl_->server.listen_after_bind();
}

void ApiServer::start() {
    if (!impl_->bound) throw StoreError("server is not bound");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void ApiServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace availd::service
