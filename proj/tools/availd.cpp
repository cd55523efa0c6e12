// availd: service entry point and operator commands.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "availd/service/api.hpp"

using namespace availd;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::unique_ptr<service::Service> open_service(const std::string& config, const std::string& data_dir) {
    return service::Service::open(service::load_config(config), data_dir);
}

int serve(const std::string& config_path, const std::string& data_dir, const std::string& host, int port) {
    // Signals are taken by a dedicated thread; block them everywhere else.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto svc = open_service(config_path, data_dir);
    service::ApiServer api(*svc);
    const int bound = api.bind(host, port);
    svc->start_refresh_timer();
    spdlog::info("availd listening on {}:{} (data dir {}, last seq {})", host, bound, data_dir,
                 svc->engine().last_seq());

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("signal {} received, shutting down", sig);
        api.stop();
    });
    api.run();
    // run() also returns if the listener fails; release the waiter then.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    svc->stop_refresh_timer();
    svc->write_snapshot();
    return 0;
}

metrics::TimeInterval period_from(const service::Service& svc, const std::string& from, const std::string& to) {
    const auto def = svc.default_period();
    return {from.empty() ? def.start() : parse_rfc3339(from), to.empty() ? def.end() : parse_rfc3339(to)};
}

int simulate(const std::string& scenario, const std::string& config, const std::string& data_dir,
             bool event_time) {
    const auto events = alerts::run_probe_scenario(slurp(scenario));
    if (config.empty()) {
        for (const auto& e : events) std::cout << Json(e).dump() << "\n";
        return 0;
    }
    // With event_time the service clock follows the scenario instead of the wall.
    std::atomic<std::int64_t> sim_now{events.empty() ? 0 : to_unix(events.front().fired_at)};
    store::Clock clock = store::system_clock();
    if (event_time) clock = [&sim_now] { return from_unix(sim_now.load()); };
    auto svc = service::Service::open(service::load_config(config), data_dir, clock);
    for (const auto& e : events) {
        sim_now = to_unix(e.fired_at);
        auto line = store::to_json(svc->engine().ingest_alert(e));
        line["event"] = e;
        std::cout << line.dump() << "\n";
    }
    svc->write_snapshot();
    return 0;
}

int export_events(const std::string& data_dir, std::uint64_t from_seq) {
    const auto log = store::EventLog::open_file(std::filesystem::path(data_dir) / "events.ndjson");
    if (log.open_warning()) spdlog::warn("{}", *log.open_warning());
    for (const auto& e : log.read(from_seq)) std::cout << store::to_line(e);
    return 0;
}

int import_events(const std::string& file, const std::string& config, const std::string& data_dir) {
    std::vector<store::StoredEvent> events;
    std::istringstream in(slurp(file));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            events.push_back(store::event_from_json(Json::parse(line)));
        } catch (const Json::parse_error& e) {
            throw ParseError(n, e.what());
        } catch (const Error& e) {
            throw ParseError(n, e.what());
        }
    }
    auto svc = open_service(config, data_dir);
    const auto added = svc->engine().import_events(events);
    svc->write_snapshot();
    std::cout << "imported " << added << " of " << events.size() << " events; last seq "
              << svc->engine().last_seq() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"availd: availability SLA management service"};
    app.require_subcommand(1);

    std::string config;
    std::string data_dir = "data";
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API and dashboard job");
    serve_cmd->add_option("--config", config, "Service configuration (JSON)")->required()->check(CLI::ExistingFile);
    serve_cmd->add_option("--data-dir", data_dir, "Directory holding events.ndjson and snapshot.json");
    serve_cmd->add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", host, "Listen address");

    std::string from, to, format = "json";
    auto* report_cmd = app.add_subcommand("report", "Print the executive report");
    report_cmd->add_option("--config", config)->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--data-dir", data_dir);
    report_cmd->add_option("--from", from, "Period start (RFC3339), default start of year");
    report_cmd->add_option("--to", to, "Period end (RFC3339), default now");
    report_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));

    std::string scenario;
    auto* simulate_cmd = app.add_subcommand("simulate", "Expand a probe scenario into alert events");
    simulate_cmd->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    simulate_cmd->add_option("--config", config, "Also ingest the events into the store");
    simulate_cmd->add_option("--data-dir", data_dir);
    bool event_time = false;
    simulate_cmd->add_flag("--event-time", event_time, "Use each event's fired_at as the service clock");

    std::uint64_t from_seq = 1;
    auto* export_cmd = app.add_subcommand("export", "Write events from a seq onwards as NDJSON");
    export_cmd->add_option("--from-seq", from_seq)->check(CLI::PositiveNumber);
    export_cmd->add_option("--data-dir", data_dir);

    std::string import_file;
    auto* import_cmd = app.add_subcommand("import", "Append-only merge of exported events");
    import_cmd->add_option("file", import_file)->required()->check(CLI::ExistingFile);
    import_cmd->add_option("--config", config)->required()->check(CLI::ExistingFile);
    import_cmd->add_option("--data-dir", data_dir);

    auto* calendar_cmd = app.add_subcommand("calendar", "Print the release calendar");
    calendar_cmd->add_option("--config", config)->required()->check(CLI::ExistingFile);
    calendar_cmd->add_option("--data-dir", data_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) return serve(config, data_dir, host, port);
        if (*report_cmd) {
            auto svc = open_service(config, data_dir);
            const auto report = svc->executive_report(period_from(*svc, from, to));
            std::cout << (format == "text" ? service::render_executive_text(report) : report.dump(2) + "\n");
            return 0;
        }
        if (*simulate_cmd) return simulate(scenario, config, data_dir, event_time);
        if (*export_cmd) return export_events(data_dir, from_seq);
        if (*import_cmd) return import_events(import_file, config, data_dir);
        if (*calendar_cmd) {
            auto svc = open_service(config, data_dir);
            const auto cal = svc->engine().read(
                [](const store::State& s) { return change::export_release_calendar(store::State::values(s.releases())); });
            std::cout << cal.dump(2) << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& d : e.details()) std::cerr << "  - " << d << "\n";
        return 1;
    }
    return 0;
}
