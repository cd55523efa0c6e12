#include "availd/service/views.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace availd::service {

namespace {

double minutes(Seconds s) { return metrics::to_report_minutes(FractionalSeconds(s)); }

std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

}  // namespace

View parse_view(const std::string& text) {
    if (text == "percent") return View::Percent;
    if (text == "minutes") return View::Minutes;
    throw ValidationError("view must be 'percent' or 'minutes', got '" + text + "'");
}

ProductAvailability product_availability(const ProductConfig& product,
                                         const std::vector<records::OutageRecord>& records,
                                         const metrics::TimeInterval& period) {
    const auto planned = metrics::expand_schedule(product.schedule, period);
    const auto ledger = records::downtime_ledger(records, product.id, period);
    ProductAvailability a{product.id, product.name, product.sla_target_percent, period, {}, {}, {}};
    a.result = metrics::compute_availability(planned, ledger);
    a.allowed = metrics::allowed_downtime(product.sla_target_percent, a.result.planned);
    a.sla = metrics::evaluate_sla(product.sla_target_percent, a.result);
    return a;
}

Json availability_view(const ProductAvailability& a, View view) {
    Json j{{"product_id", a.product_id},
           {"from", a.period.start()},
           {"to", a.period.end()},
           {"view", view == View::Percent ? "percent" : "minutes"},
           {"sla_target_percent", a.sla_target_percent},
           {"met", a.sla.met},
           {"margin_seconds", std::round(a.sla.margin.count() * 1000.0) / 1000.0},
           {"margin_minutes", metrics::to_report_minutes(a.sla.margin)},
           {"flag", a.result.has_planned_uptime() ? Json(nullptr) : Json(kNoPlannedUptime)}};
    if (view == View::Percent) {
        j["availability_percent"] = a.result.availability_percent
                                        ? Json(metrics::round_percent(*a.result.availability_percent))
                                        : Json(nullptr);
        j["planned_seconds"] = a.result.planned.count();
        j["downtime_seconds"] = a.result.downtime.count();
        j["uptime_seconds"] = a.result.uptime.count();
    } else {
        j["minutes"] = Json{{"planned", minutes(a.result.planned)},
                            {"downtime", minutes(a.result.downtime)},
                            {"allowed", metrics::to_report_minutes(a.allowed)}};
    }
    return j;
}

DashboardRow dashboard_row(const ProductAvailability& a) {
    DashboardRow r;
    r.product_id = a.product_id;
    r.name = a.name;
    r.sla_target_percent = a.sla_target_percent;
    if (a.result.availability_percent) r.availability_percent = metrics::round_percent(*a.result.availability_percent);
    r.planned_minutes = minutes(a.result.planned);
    r.downtime_minutes = minutes(a.result.downtime);
    r.allowed_downtime_minutes = metrics::to_report_minutes(a.allowed);
    r.margin_minutes = metrics::to_report_minutes(a.sla.margin);
    r.met = a.sla.met;
    if (!a.result.has_planned_uptime()) r.flag = kNoPlannedUptime;
    return r;
}

DashboardSnapshot compute_dashboard(const ServiceConfig& config, const store::State& state,
                                    const metrics::TimeInterval& period, Timestamp now) {
    DashboardSnapshot s{now, period, state.last_seq(), {}};
    const auto records = store::State::values(state.records());
    for (const auto& p : config.products) s.rows.push_back(dashboard_row(product_availability(p, records, period)));
    return s;
}

Json to_json(const DashboardRow& r) {
    return Json{{"product_id", r.product_id},
                {"name", r.name},
                {"sla_target_percent", r.sla_target_percent},
                {"availability_percent", r.availability_percent},
                {"planned_minutes", r.planned_minutes},
                {"downtime_minutes", r.downtime_minutes},
                {"allowed_downtime_minutes", r.allowed_downtime_minutes},
                {"margin_minutes", r.margin_minutes},
                {"met", r.met},
                {"flag", r.flag}};
}

Json to_json(const DashboardSnapshot& s) {
    Json rows = Json::array();
    for (const auto& r : s.rows) rows.push_back(to_json(r));
    return Json{{"generated_at", s.generated_at}, {"period", s.period}, {"as_of_seq", s.as_of_seq}, {"rows", rows}};
}

Json executive_report(const ServiceConfig& config, const store::State& state, const metrics::TimeInterval& period) {
    Json report;
    report["period"] = period;
    report["incidents"] = incident::incident_statistics(state.incident_list(), period);

    const auto records = store::State::values(state.records());
    Json sla = Json::array();
    Json breaches = Json::array();
    for (const auto& p : config.products) {
        const auto row = to_json(dashboard_row(product_availability(p, records, period)));
        if (!row["met"].get<bool>()) breaches.push_back(row);
        sla.push_back(row);
    }
    report["sla_attainment"] = sla;
    report["breaches"] = breaches;

    std::vector<problem::ProblemTicket> tickets;
    for (const auto& [_, t] : state.problems()) {
        if (period.contains(t.created_at)) tickets.push_back(t);
    }
    report["rca_backlog"] = problem::rca_backlog_report(tickets, period.end());
    report["rca_backlog"]["tickets"] = tickets.size();

    Json change_states = Json::object();
    for (auto s : change::kAllChangeStates) change_states[change::to_string(s)] = 0;
    std::size_t change_total = 0;
    std::size_t emergency = 0;
    for (const auto& [_, c] : state.changes()) {
        if (!period.contains(c.requested_at)) continue;
        ++change_total;
        if (c.emergency) ++emergency;
        change_states[change::to_string(c.state)] = change_states[change::to_string(c.state)].get<int>() + 1;
    }
    report["changes"] = Json{{"total", change_total}, {"emergency", emergency}, {"by_state", change_states}};

    Json release_states = Json::object();
    for (auto s : change::kAllReleaseStates) release_states[change::to_string(s)] = 0;
    std::size_t release_total = 0;
    for (const auto& [_, r] : state.releases()) {
        if (!period.contains(r.target_window.start())) continue;
        ++release_total;
        release_states[change::to_string(r.state)] = release_states[change::to_string(r.state)].get<int>() + 1;
    }
    report["releases"] = Json{{"total", release_total}, {"by_state", release_states}};
    return report;
}

std::string render_executive_text(const Json& r) {
    std::ostringstream out;
    out << "Executive report " << r["period"]["start"].get<std::string>() << " to "
        << r["period"]["end"].get<std::string>() << "\n\n";

    const auto& inc = r["incidents"];
    out << "Incidents: " << inc["total"].get<std::size_t>() << "\n";
    for (const auto& [sev, n] : inc["by_severity"].items()) out << "  " << sev << ": " << n.get<std::size_t>() << "\n";
    const auto& d = inc["outage_durations"];
    out << "  outages: " << d["count"].get<std::size_t>() << ", mean "
        << fixed(d["mean_seconds"].get<double>() / 60.0, 2) << " min\n\n";

    out << "SLA attainment:\n";
    for (const auto& row : r["sla_attainment"]) {
        out << "  " << row["product_id"].get<std::string>() << "  ";
        if (row["availability_percent"].is_null()) {
            out << row["flag"].get<std::string>();
        } else {
            out << fixed(row["availability_percent"].get<double>(), 4) << "% (target "
                << fixed(row["sla_target_percent"].get<double>(), 4) << "%), downtime "
                << fixed(row["downtime_minutes"].get<double>(), 2) << " of "
                << fixed(row["allowed_downtime_minutes"].get<double>(), 2) << " min, "
                << (row["met"].get<bool>() ? "met" : "BREACH");
        }
        out << "\n";
    }
    out << "\nBreaches: " << r["breaches"].size() << "\n";
    for (const auto& b : r["breaches"]) {
        out << "  " << b["product_id"].get<std::string>() << " margin " << fixed(b["margin_minutes"].get<double>(), 2)
            << " min\n";
    }

    const auto& rca = r["rca_backlog"];
    out << "\nRCA backlog: " << rca["open"].get<std::size_t>() << " open, "
        << rca["awaiting_review"].get<std::size_t>() << " awaiting review, " << rca["overdue"].get<std::size_t>()
        << " overdue\n";

    out << "Changes: " << r["changes"]["total"].get<std::size_t>() << " ("
        << r["changes"]["emergency"].get<std::size_t>() << " emergency)\n";
    for (const auto& [s, n] : r["changes"]["by_state"].items()) out << "  " << s << ": " << n.get<int>() << "\n";
    out << "Releases: " << r["releases"]["total"].get<std::size_t>() << "\n";
    for (const auto& [s, n] : r["releases"]["by_state"].items()) out << "  " << s << ": " << n.get<int>() << "\n";
    return out.str();
}

}  // namespace availd::service
