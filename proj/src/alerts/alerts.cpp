#include "availd/alerts/alerts.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "availd/core/error.hpp"

namespace availd::alerts {

std::string to_string(MonitorLayer l) {
    switch (l) {
        case MonitorLayer::Infrastructure: return "infrastructure";
        case MonitorLayer::ExternalProbe: return "external-probe";
        case MonitorLayer::Apm: return "apm";
        case MonitorLayer::CustomLog: return "custom-log";
    }
    return "unknown";
}

std::string to_string(Comparator c) {
    switch (c) {
        case Comparator::Greater: return ">";
        case Comparator::GreaterEqual: return ">=";
        case Comparator::Less: return "<";
        case Comparator::LessEqual: return "<=";
    }
    return "?";
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::Created: return "created";
        case Classification::Attached: return "attached";
        case Classification::Ignored: return "ignored";
        case Classification::Rejected: return "rejected";
    }
    return "unknown";
}

MonitorLayer parse_layer(const std::string& text) {
    for (auto l : {MonitorLayer::Infrastructure, MonitorLayer::ExternalProbe, MonitorLayer::Apm,
                   MonitorLayer::CustomLog}) {
        if (to_string(l) == text) return l;
    }
    throw ValidationError("unknown monitor layer '" + text + "'");
}

Comparator parse_comparator(const std::string& text) {
    if (text == ">") return Comparator::Greater;
    if (text == ">=" || text == "≥") return Comparator::GreaterEqual;
    if (text == "<") return Comparator::Less;
    if (text == "<=" || text == "≤") return Comparator::LessEqual;
    throw ValidationError("threshold comparator must be one of >, >=, <, <= (got '" + text + "')");
}

Classification parse_classification(const std::string& text) {
    for (auto c : {Classification::Created, Classification::Attached, Classification::Ignored,
                   Classification::Rejected}) {
        if (to_string(c) == text) return c;
    }
    throw ValidationError("unknown alert classification '" + text + "'");
}

bool MonitorProfile::violated_by(double value) const {
    switch (comparator) {
        case Comparator::Greater: return value > threshold;
        case Comparator::GreaterEqual: return value >= threshold;
        case Comparator::Less: return value < threshold;
        case Comparator::LessEqual: return value <= threshold;
    }
    return false;
}

void validate(const MonitorProfile& p) {
    std::vector<std::string> problems;
    if (p.monitor_id.empty()) problems.emplace_back("monitor_id is empty");
    if (p.product_id.empty()) problems.emplace_back("product_id is empty");
    if (p.dedup_window.count() <= 0) problems.emplace_back("dedup_window must be positive");
    if (!problems.empty()) throw ValidationError("invalid monitor profile '" + p.monitor_id + "'", problems);
}

const AlertLedger::Seen* AlertLedger::seen(const std::string& monitor_id, Timestamp fired_at) const {
    const auto it = seen_.find({monitor_id, to_unix(fired_at)});
    return it == seen_.end() ? nullptr : &it->second;
}

void AlertLedger::record(const AlertEvent& event, Classification kind, const std::string& incident_id,
                         bool duplicate) {
    switch (kind) {
        case Classification::Created: ++counters_.created; break;
        case Classification::Attached: ++counters_.attached; break;
        case Classification::Ignored: ++counters_.ignored; break;
        case Classification::Rejected: ++counters_.rejected; break;
    }
    if (duplicate) {
        ++counters_.duplicates;
        return;
    }
    if (kind == Classification::Rejected) return;
    seen_[{event.monitor_id, to_unix(event.fired_at)}] = Seen{kind, incident_id};
    if (kind == Classification::Created) {
        active_[event.monitor_id] = Active{incident_id, event.fired_at};
    } else if (kind == Classification::Attached) {
        auto& a = active_[event.monitor_id];
        a.incident_id = incident_id;
        a.last_fired_at = std::max(a.last_fired_at, event.fired_at);
    }
}

Json AlertLedger::to_json() const {
    Json active = Json::object();
    for (const auto& [monitor, a] : active_) {
        active[monitor] = {{"incident_id", a.incident_id}, {"last_fired_at", a.last_fired_at}};
    }
    Json seen = Json::array();
    for (const auto& [key, s] : seen_) {
        seen.push_back({{"monitor_id", key.first},
                        {"fired_at", from_unix(key.second)},
                        {"kind", to_string(s.kind)},
                        {"incident_id", s.incident_id}});
    }
    Json counters;
    alerts::to_json(counters, counters_);
    return Json{{"counters", counters}, {"active", active}, {"seen", seen}};
}

AlertLedger AlertLedger::from_json(const Json& j) {
    AlertLedger ledger;
    try {
        const Json& c = j.at("counters");
        ledger.counters_.created = c.at("created").get<std::uint64_t>();
        ledger.counters_.attached = c.at("attached").get<std::uint64_t>();
        ledger.counters_.ignored = c.at("ignored").get<std::uint64_t>();
        ledger.counters_.rejected = c.at("rejected").get<std::uint64_t>();
        ledger.counters_.duplicates = c.at("duplicates").get<std::uint64_t>();
        for (const auto& [monitor, a] : j.at("active").items()) {
            ledger.active_[monitor] = Active{a.at("incident_id").get<std::string>(), a.at("last_fired_at").get<Timestamp>()};
        }
        for (const auto& s : j.at("seen")) {
            ledger.seen_[{s.at("monitor_id").get<std::string>(), to_unix(s.at("fired_at").get<Timestamp>())}] =
                Seen{parse_classification(s.at("kind").get<std::string>()), s.at("incident_id").get<std::string>()};
        }
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_validation(e, "alert ledger");
    }
    return ledger;
}

IngestResult ingest_alert(const AlertEvent& event, const MonitorCatalog& monitors,
                          const std::map<std::string, incident::Incident>& incidents, const AlertLedger& ledger,
                          Timestamp now, const std::string& new_incident_id,
                          const incident::ProductSet& known_products) {
    IngestResult result;
    const auto profile_it = monitors.find(event.monitor_id);
    if (profile_it == monitors.end()) {
        result.kind = Classification::Rejected;
        result.reason = "unknown monitor '" + event.monitor_id + "'";
        return result;
    }
    if (const auto* seen = ledger.seen(event.monitor_id, event.fired_at)) {
        result.kind = seen->kind;
        result.incident_id = seen->incident_id;
        result.duplicate = true;
        result.reason = "redelivered event";
        return result;
    }
    const MonitorProfile& profile = profile_it->second;

    const incident::Incident* open = nullptr;
    Timestamp last_fired{};
    if (const auto a = ledger.active().find(event.monitor_id); a != ledger.active().end()) {
        const auto inc = incidents.find(a->second.incident_id);
        if (inc != incidents.end() && inc->second.state != incident::State::Closed) {
            open = &inc->second;
            last_fired = a->second.last_fired_at;
        }
    }
    const Json note{{"monitor_id", event.monitor_id},
                    {"fired_at", event.fired_at},
                    {"value", event.value},
                    {"message", event.message}};
    const std::string actor = "monitor:" + event.monitor_id;

    if (!profile.violated_by(event.value)) {
        result.kind = Classification::Ignored;
        result.reason = "value " + std::to_string(event.value) + " does not violate " + to_string(profile.comparator) +
                        " " + std::to_string(profile.threshold);
        if (open != nullptr) {
            result.incident_id = open->id;
            result.incident = incident::annotate(*open, actor, event.fired_at, "alert.recovery", note);
        }
        return result;
    }

    const auto gap = event.fired_at > last_fired ? event.fired_at - last_fired : last_fired - event.fired_at;
    if (open != nullptr && gap <= profile.dedup_window) {
        result.kind = Classification::Attached;
        result.incident_id = open->id;
        result.incident = incident::annotate(*open, actor, event.fired_at, "alert.attached", note);
        return result;
    }

    incident::IncidentDetails details;
    details.id = new_incident_id;
    details.product_ids = {profile.product_id};
    details.severity = profile.severity_on_fire;
    details.causes_outage = profile.opens_outage;
    details.source = incident::Source::Alert;
    details.monitor_id = profile.monitor_id;
    details.title = profile.metric + " " + to_string(profile.comparator) + " " + std::to_string(profile.threshold) +
                    " on " + profile.monitor_id;
    details.description = event.message;
    details.occurred_at = std::min(event.fired_at, now);
    details.actor = actor;
    result.kind = Classification::Created;
    result.incident_id = new_incident_id;
    result.incident = incident::open_incident(details, known_products, now);
    return result;
}

namespace {

std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> words;
    std::istringstream in{std::string(line)};
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

}  // namespace

ProbeScenario parse_probe_scenario(std::string_view text) {
    ProbeScenario scenario;
    std::set<std::string> declared;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto words = split_words(line);
        if (words.empty()) continue;

        if (words[0] == "monitor") {
            if (words.size() != 4 || words[2] != "interval") {
                throw ParseError(line_no, "expected 'monitor <id> interval <seconds>'");
            }
            std::int64_t seconds = 0;
            const auto& n = words[3];
            const auto [end, ec] = std::from_chars(n.data(), n.data() + n.size(), seconds);
            if (ec != std::errc{} || end != n.data() + n.size() || seconds <= 0) {
                throw ParseError(line_no, "interval must be a positive integer number of seconds");
            }
            if (!declared.insert(words[1]).second) {
                throw ParseError(line_no, "monitor '" + words[1] + "' declared twice");
            }
            scenario.monitors.push_back({words[1], Seconds{seconds}});
        } else if (words[0] == "down") {
            if (words.size() != 4) throw ParseError(line_no, "expected 'down <id> <start RFC3339> <end RFC3339>'");
            if (!declared.contains(words[1])) {
                throw ParseError(line_no, "monitor '" + words[1] + "' used before its 'monitor' line");
            }
            try {
                scenario.down[words[1]].emplace_back(parse_rfc3339(words[2]), parse_rfc3339(words[3]));
            } catch (const ValidationError& e) {
                throw ParseError(line_no, e.what());
            }
        } else {
            throw ParseError(line_no, "unknown directive '" + words[0] + "'");
        }
    }
    return scenario;
}

std::vector<AlertEvent> run_probe_scenario(const ProbeScenario& scenario) {
    std::vector<AlertEvent> events;
    for (const auto& m : scenario.monitors) {
        const auto it = scenario.down.find(m.id);
        if (it == scenario.down.end()) continue;
        std::set<std::int64_t> ticks;
        const std::int64_t step = m.interval.count();
        for (const auto& iv : it->second) {
            const std::int64_t s = to_unix(iv.start());
            std::int64_t t = s % step == 0 ? s : s + (step - ((s % step) + step) % step);
            for (; t < to_unix(iv.end()); t += step) ticks.insert(t);
        }
        for (const auto t : ticks) events.push_back({m.id, from_unix(t), 1.0, "probe " + m.id + " failed"});
    }
    std::stable_sort(events.begin(), events.end(), [](const AlertEvent& a, const AlertEvent& b) {
        if (a.fired_at != b.fired_at) return a.fired_at < b.fired_at;
        return a.monitor_id < b.monitor_id;
    });
    return events;
}

std::vector<AlertEvent> run_probe_scenario(std::string_view text) {
    return run_probe_scenario(parse_probe_scenario(text));
}

void to_json(Json& j, const MonitorProfile& p) {
    j = Json{{"monitor_id", p.monitor_id},
             {"product_id", p.product_id},
             {"layer", to_string(p.layer)},
             {"metric", p.metric},
             {"comparator", to_string(p.comparator)},
             {"threshold", p.threshold},
             {"severity_on_fire", p.severity_on_fire},
             {"dedup_window_seconds", p.dedup_window.count()},
             {"opens_outage", p.opens_outage}};
}

void from_json(const Json& j, MonitorProfile& p) {
    p.monitor_id = required<std::string>(j, "monitor_id");
    p.product_id = required<std::string>(j, "product_id");
    p.layer = parse_layer(j.value("layer", "external-probe"));
    p.metric = j.value("metric", "probe_failed");
    p.comparator = parse_comparator(j.value("comparator", ">"));
    p.threshold = required<double>(j, "threshold");
    p.severity_on_fire = optional_field<incident::Severity>(j, "severity_on_fire").value_or(incident::Severity::Sev2);
    p.dedup_window = Seconds{j.value("dedup_window_seconds", std::int64_t{1800})};
    p.opens_outage = j.value("opens_outage", p.layer == MonitorLayer::ExternalProbe);
}

void to_json(Json& j, const AlertEvent& e) {
    j = Json{{"monitor_id", e.monitor_id}, {"fired_at", e.fired_at}, {"value", e.value}, {"message", e.message}};
}

void from_json(const Json& j, AlertEvent& e) {
    if (!j.is_object()) throw ValidationError("alert body must be a JSON object");
    e.monitor_id = required<std::string>(j, "monitor_id");
    e.fired_at = required<Timestamp>(j, "fired_at");
    if (!j.contains("value") || !j.at("value").is_number()) throw ValidationError("alert 'value' must be a number");
    e.value = j.at("value").get<double>();
    e.message = j.value("message", "");
}

void to_json(Json& j, const Counters& c) {
    j = Json{{"created", c.created},     {"attached", c.attached},   {"ignored", c.ignored},
             {"rejected", c.rejected},   {"duplicates", c.duplicates}, {"received", c.received()}};
}

}  // namespace availd::alerts
