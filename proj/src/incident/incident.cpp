#include "availd/incident/incident.hpp"

#include <algorithm>

#include "availd/core/error.hpp"

namespace availd::incident {

std::string to_string(Severity s) {
    switch (s) {
        case Severity::Sev1: return "Sev1";
        case Severity::Sev2: return "Sev2";
        case Severity::Sev3: return "Sev3";
        case Severity::Sev4: return "Sev4";
    }
    return "unknown";
}

std::string to_string(State s) {
    switch (s) {
        case State::New: return "New";
        case State::Classified: return "Classified";
        case State::InProgress: return "InProgress";
        case State::Resolved: return "Resolved";
        case State::Closed: return "Closed";
    }
    return "unknown";
}

std::string to_string(Source s) { return s == Source::Alert ? "alert" : "manual"; }

Severity parse_severity(const std::string& text) {
    for (auto s : {Severity::Sev1, Severity::Sev2, Severity::Sev3, Severity::Sev4}) {
        if (to_string(s) == text) return s;
    }
    throw ValidationError("unknown severity '" + text + "'");
}

State parse_state(const std::string& text) {
    for (auto s : kAllStates) {
        if (to_string(s) == text) return s;
    }
    throw ValidationError("unknown incident state '" + text + "'");
}

Source parse_source(const std::string& text) {
    if (text == "alert") return Source::Alert;
    if (text == "manual") return Source::Manual;
    throw ValidationError("unknown incident source '" + text + "'");
}

const std::vector<TransitionRule>& transition_table() {
    static const std::vector<TransitionRule> table{
        {State::New, State::Classified, {}},
        {State::Classified, State::InProgress, {}},
        {State::InProgress, State::Resolved, {"repaired_at", "recovered_at", "restored_at"}},
        {State::Resolved, State::Closed, {"restored_at"}},
        {State::Resolved, State::InProgress, {}},
        {State::Closed, State::InProgress, {}},
    };
    return table;
}

const TransitionRule* find_rule(State from, State to) {
    for (const auto& rule : transition_table()) {
        if (rule.from == from && rule.to == to) return &rule;
    }
    return nullptr;
}

void check_lifecycle_order(const Lifecycle& l) {
    const std::array<std::pair<const char*, const std::optional<Timestamp>*>, 6> ordered{{
        {"occurred_at", &l.occurred_at},
        {"detected_at", &l.detected_at},
        {"diagnosed_at", &l.diagnosed_at},
        {"repaired_at", &l.repaired_at},
        {"recovered_at", &l.recovered_at},
        {"restored_at", &l.restored_at},
    }};
    const char* prev_name = nullptr;
    std::optional<Timestamp> prev;
    for (const auto& [name, value] : ordered) {
        if (!value->has_value()) continue;
        if (prev && **value < *prev) {
            throw ValidationError(std::string("lifecycle out of order: ") + name + " (" +
                                  format_rfc3339(**value) + ") precedes " + prev_name + " (" +
                                  format_rfc3339(*prev) + ")");
        }
        prev = *value;
        prev_name = name;
    }
}

namespace {

void check_products(const std::vector<std::string>& product_ids, const ProductSet& known) {
    if (product_ids.empty()) throw ValidationError("incident needs at least one product id");
    std::vector<std::string> unknown;
    for (const auto& p : product_ids) {
        if (!known.contains(p)) unknown.push_back(p);
    }
    if (!unknown.empty()) throw ValidationError("unknown product id", std::move(unknown));
}

const std::optional<Timestamp>& lifecycle_field(const Lifecycle& l, const std::string& name) {
    if (name == "repaired_at") return l.repaired_at;
    if (name == "recovered_at") return l.recovered_at;
    if (name == "restored_at") return l.restored_at;
    if (name == "diagnosed_at") return l.diagnosed_at;
    if (name == "detected_at") return l.detected_at;
    return l.occurred_at;
}

}  // namespace

Incident open_incident(const IncidentDetails& details, const ProductSet& known_products, Timestamp now) {
    if (details.id.empty()) throw ValidationError("incident id must not be empty");
    if (details.title.empty()) throw ValidationError("incident title must not be empty");
    check_products(details.product_ids, known_products);

    Incident inc;
    inc.id = details.id;
    inc.product_ids = details.product_ids;
    inc.severity = details.severity;
    inc.causes_outage = details.causes_outage;
    inc.source = details.source;
    inc.monitor_id = details.monitor_id;
    inc.title = details.title;
    inc.description = details.description;
    inc.lifecycle.detected_at = now;
    inc.lifecycle.occurred_at = details.occurred_at.value_or(now);
    check_lifecycle_order(inc.lifecycle);
    inc.audit_trail.push_back({now, details.actor, "opened", details});
    return inc;
}

Incident transition(Incident inc, State to, const TransitionFields& fields, const std::string& actor,
                    Timestamp now, const ProductSet& known_products) {
    const TransitionRule* rule = find_rule(inc.state, to);
    if (rule == nullptr) {
        throw StateMachineError("incident:" + to_string(inc.state) + "->" + to_string(to),
                                "illegal incident transition " + to_string(inc.state) + " -> " + to_string(to));
    }
    if (to == State::Closed) {
        throw StateMachineError(rule->name(), "incidents are closed through close_incident");
    }
    const State from = inc.state;

    if (fields.product_ids) {
        if (inc.state == State::Closed) {
            throw ValidationError("product list can only be edited before closure");
        }
        check_products(*fields.product_ids, known_products);
        inc.product_ids = *fields.product_ids;
    }
    if (fields.severity) inc.severity = *fields.severity;
    if (fields.causes_outage) inc.causes_outage = *fields.causes_outage;
    if (fields.occurred_at) inc.lifecycle.occurred_at = fields.occurred_at;
    if (fields.diagnosed_at) inc.lifecycle.diagnosed_at = fields.diagnosed_at;
    if (fields.repaired_at) inc.lifecycle.repaired_at = fields.repaired_at;
    if (fields.recovered_at) inc.lifecycle.recovered_at = fields.recovered_at;
    if (fields.restored_at) inc.lifecycle.restored_at = fields.restored_at;
    check_lifecycle_order(inc.lifecycle);

    if (inc.causes_outage) {
        std::vector<std::string> missing;
        for (const auto& name : rule->required_for_outage) {
            if (!lifecycle_field(inc.lifecycle, name)) missing.push_back(name);
        }
        if (!missing.empty()) {
            throw ValidationError(rule->name() + " requires lifecycle fields for an outage incident", missing);
        }
    }

    inc.state = to;
    inc.audit_trail.push_back(
        {now, actor, "transitioned", Json{{"from", from}, {"to", to}, {"fields", fields}}});
    return inc;
}

CloseOutcome close_incident(Incident inc, const std::string& actor, Timestamp now, const SeverityPolicy& policy) {
    if (inc.state != State::Resolved) {
        throw StateMachineError("incident:" + to_string(inc.state) + "->Closed",
                                "only Resolved incidents can be closed (state is " + to_string(inc.state) + ")");
    }
    if (inc.causes_outage && !inc.lifecycle.restored_at) {
        throw ValidationError("closing an outage incident requires restored_at", {"restored_at"});
    }
    CloseOutcome out;
    const bool significant = policy.is_significant(inc.severity);
    if (inc.causes_outage && significant && !inc.outage_record_emitted) {
        out.outage_draft = OutageRecordDraft{
            inc.id, inc.product_ids, metrics::TimeInterval{*inc.lifecycle.occurred_at, *inc.lifecycle.restored_at}};
        inc.outage_record_emitted = true;
    }
    if (significant && !inc.problem_trigger_emitted) {
        out.problem_trigger = ProblemTrigger{inc.id, inc.severity, inc.product_ids, now};
        inc.problem_trigger_emitted = true;
    }
    inc.state = State::Closed;
    inc.audit_trail.push_back({now, actor, "closed", Json::object()});
    out.incident = std::move(inc);
    return out;
}

Incident annotate(Incident inc, const std::string& actor, Timestamp at, const std::string& event, Json detail) {
    inc.audit_trail.push_back({at, actor, event, std::move(detail)});
    return inc;
}

Incident replay_audit(const std::vector<AuditEntry>& trail, const ProductSet& known_products,
                      const SeverityPolicy& policy) {
    if (trail.empty() || trail.front().event != "opened") {
        throw ValidationError("audit trail must start with the opening event");
    }
    Incident inc = open_incident(trail.front().detail.get<IncidentDetails>(), known_products, trail.front().at);
    for (std::size_t i = 1; i < trail.size(); ++i) {
        const auto& e = trail[i];
        if (e.event == "transitioned") {
            inc = transition(std::move(inc), e.detail.at("to").get<State>(),
                             e.detail.at("fields").get<TransitionFields>(), e.actor, e.at, known_products);
        } else if (e.event == "closed") {
            inc = close_incident(std::move(inc), e.actor, e.at, policy).incident;
        } else {
            inc = annotate(std::move(inc), e.actor, e.at, e.event, e.detail);
        }
    }
    return inc;
}

IncidentStatistics incident_statistics(const std::vector<Incident>& incidents, const metrics::TimeInterval& period) {
    IncidentStatistics stats;
    std::vector<Seconds> durations;
    for (const auto& inc : incidents) {
        if (!inc.lifecycle.detected_at || !period.contains(*inc.lifecycle.detected_at)) continue;
        ++stats.total;
        ++stats.by_severity[to_string(inc.severity)];
        ++stats.by_source[to_string(inc.source)];
        for (const auto& p : inc.product_ids) ++stats.by_product[p];
        if (inc.causes_outage && inc.lifecycle.restored_at && inc.lifecycle.occurred_at) {
            durations.push_back(*inc.lifecycle.restored_at - *inc.lifecycle.occurred_at);
        }
    }
    auto& d = stats.outage_durations;
    d.count = durations.size();
    if (durations.empty()) return stats;
    std::sort(durations.begin(), durations.end());
    for (const auto s : durations) {
        d.total += s;
        const auto minutes = s.count() / 60;
        const std::size_t bucket = minutes < 15 ? 0 : minutes < 60 ? 1 : minutes < 240 ? 2 : minutes < 1440 ? 3 : 4;
        ++d.buckets[bucket];
    }
    d.min = durations.front();
    d.max = durations.back();
    d.mean_seconds = static_cast<double>(d.total.count()) / static_cast<double>(d.count);
    const std::size_t mid = d.count / 2;
    d.median_seconds = d.count % 2 == 1
                           ? static_cast<double>(durations[mid].count())
                           : (static_cast<double>(durations[mid - 1].count()) + durations[mid].count()) / 2.0;
    return stats;
}

void to_json(Json& j, const Lifecycle& l) {
    j = Json{{"occurred_at", l.occurred_at},   {"detected_at", l.detected_at},
             {"diagnosed_at", l.diagnosed_at}, {"repaired_at", l.repaired_at},
             {"recovered_at", l.recovered_at}, {"restored_at", l.restored_at}};
}

void from_json(const Json& j, Lifecycle& l) {
    l.occurred_at = optional_field<Timestamp>(j, "occurred_at");
    l.detected_at = optional_field<Timestamp>(j, "detected_at");
    l.diagnosed_at = optional_field<Timestamp>(j, "diagnosed_at");
    l.repaired_at = optional_field<Timestamp>(j, "repaired_at");
    l.recovered_at = optional_field<Timestamp>(j, "recovered_at");
    l.restored_at = optional_field<Timestamp>(j, "restored_at");
}

void to_json(Json& j, const AuditEntry& a) {
    j = Json{{"at", a.at}, {"actor", a.actor}, {"event", a.event}, {"detail", a.detail}};
}

void from_json(const Json& j, AuditEntry& a) {
    a.at = required<Timestamp>(j, "at");
    a.actor = j.value("actor", "");
    a.event = required<std::string>(j, "event");
    a.detail = j.value("detail", Json::object());
}

void to_json(Json& j, const Incident& i) {
    j = Json{{"id", i.id},
             {"product_ids", i.product_ids},
             {"severity", i.severity},
             {"state", i.state},
             {"causes_outage", i.causes_outage},
             {"lifecycle", i.lifecycle},
             {"source", i.source},
             {"monitor_id", i.monitor_id},
             {"title", i.title},
             {"description", i.description},
             {"audit_trail", i.audit_trail},
             {"outage_record_emitted", i.outage_record_emitted},
             {"problem_trigger_emitted", i.problem_trigger_emitted}};
}

void from_json(const Json& j, Incident& i) {
    i.id = required<std::string>(j, "id");
    i.product_ids = required<std::vector<std::string>>(j, "product_ids");
    i.severity = required<Severity>(j, "severity");
    i.state = required<State>(j, "state");
    i.causes_outage = j.value("causes_outage", false);
    i.lifecycle = j.value("lifecycle", Lifecycle{});
    i.source = j.value("source", Source::Manual);
    i.monitor_id = optional_field<std::string>(j, "monitor_id");
    i.title = j.value("title", "");
    i.description = j.value("description", "");
    i.audit_trail = j.value("audit_trail", std::vector<AuditEntry>{});
    i.outage_record_emitted = j.value("outage_record_emitted", false);
    i.problem_trigger_emitted = j.value("problem_trigger_emitted", false);
}

void to_json(Json& j, const IncidentDetails& d) {
    j = Json{{"id", d.id},
             {"product_ids", d.product_ids},
             {"severity", d.severity},
             {"causes_outage", d.causes_outage},
             {"source", d.source},
             {"monitor_id", d.monitor_id},
             {"title", d.title},
             {"description", d.description},
             {"occurred_at", d.occurred_at},
             {"actor", d.actor}};
}

void from_json(const Json& j, IncidentDetails& d) {
    d.id = j.value("id", "");
    d.product_ids = required<std::vector<std::string>>(j, "product_ids");
    d.severity = required<Severity>(j, "severity");
    d.causes_outage = j.value("causes_outage", false);
    d.source = optional_field<Source>(j, "source").value_or(Source::Manual);
    d.monitor_id = optional_field<std::string>(j, "monitor_id");
    d.title = j.value("title", "");
    d.description = j.value("description", "");
    d.occurred_at = optional_field<Timestamp>(j, "occurred_at");
    d.actor = j.value("actor", "");
}

void to_json(Json& j, const TransitionFields& f) {
    j = Json::object();
    if (f.severity) j["severity"] = *f.severity;
    if (f.causes_outage) j["causes_outage"] = *f.causes_outage;
    if (f.product_ids) j["product_ids"] = *f.product_ids;
    if (f.occurred_at) j["occurred_at"] = *f.occurred_at;
    if (f.diagnosed_at) j["diagnosed_at"] = *f.diagnosed_at;
    if (f.repaired_at) j["repaired_at"] = *f.repaired_at;
    if (f.recovered_at) j["recovered_at"] = *f.recovered_at;
    if (f.restored_at) j["restored_at"] = *f.restored_at;
    if (!f.note.empty()) j["note"] = f.note;
}

void from_json(const Json& j, TransitionFields& f) {
    if (!j.is_object()) throw ValidationError("transition fields must be an object");
    f.severity = optional_field<Severity>(j, "severity");
    f.causes_outage = optional_field<bool>(j, "causes_outage");
    f.product_ids = optional_field<std::vector<std::string>>(j, "product_ids");
    f.occurred_at = optional_field<Timestamp>(j, "occurred_at");
    f.diagnosed_at = optional_field<Timestamp>(j, "diagnosed_at");
    f.repaired_at = optional_field<Timestamp>(j, "repaired_at");
    f.recovered_at = optional_field<Timestamp>(j, "recovered_at");
    f.restored_at = optional_field<Timestamp>(j, "restored_at");
    f.note = j.value("note", "");
}

void to_json(Json& j, const IncidentStatistics& s) {
    const auto& d = s.outage_durations;
    j = Json{{"total", s.total},
             {"by_severity", s.by_severity},
             {"by_source", s.by_source},
             {"by_product", s.by_product},
             {"outage_durations",
              {{"count", d.count},
               {"total_seconds", d.total.count()},
               {"min_seconds", d.min.count()},
               {"max_seconds", d.max.count()},
               {"mean_seconds", d.mean_seconds},
               {"median_seconds", d.median_seconds},
               {"buckets", {{"lt_15m", d.buckets[0]},
                            {"lt_1h", d.buckets[1]},
                            {"lt_4h", d.buckets[2]},
                            {"lt_24h", d.buckets[3]},
                            {"ge_24h", d.buckets[4]}}}}}};
}

}  // namespace availd::incident
