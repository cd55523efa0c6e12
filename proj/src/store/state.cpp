#include "availd/store/state.hpp"

#include <cstdio>

namespace availd::store {

const problem::Resolver& DomainConfig::resolver_for(const std::vector<std::string>& product_ids) const {
    for (const auto& p : product_ids) {
        if (const auto it = resolvers.find(p); it != resolvers.end()) return it->second;
    }
    return default_resolver;
}

namespace {

template <class Map>
const typename Map::mapped_type& find_or_throw(const Map& m, std::string_view id, const char* what) {
    const auto it = m.find(id);
    if (it == m.end()) throw NotFoundError(std::string(what) + " '" + std::string(id) + "' not found");
    return it->second;
}

incident::OutageRecordDraft draft_from_json(const Json& j) {
    return incident::OutageRecordDraft{required<std::string>(j, "incident_id"),
                                       required<std::vector<std::string>>(j, "product_ids"),
                                       required<metrics::TimeInterval>(j, "outage")};
}

incident::ProblemTrigger trigger_from_json(const Json& j) {
    return incident::ProblemTrigger{required<std::string>(j, "incident_id"), required<incident::Severity>(j, "severity"),
                                    required<std::vector<std::string>>(j, "product_ids"), required<Timestamp>(j, "at")};
}

std::map<std::string, change::ItemUpdate> updates_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("'updates' must be an object keyed by checklist item");
    std::map<std::string, change::ItemUpdate> out;
    for (const auto& [key, v] : j.items()) {
        if (v.is_string()) {
            out[key] = change::ItemUpdate{change::parse_checklist_status(v.get<std::string>()), ""};
        } else {
            out[key] = change::ItemUpdate{change::parse_checklist_status(required<std::string>(v, "status")),
                                          v.value("waiver_note", "")};
        }
    }
    return out;
}

}  // namespace

State::State(std::shared_ptr<const DomainConfig> config) : config_(std::move(config)) {}

std::string State::next_id(std::string_view prefix) const {
    std::size_t n = 0;
    if (prefix == "INC") n = incidents_.size();
    else if (prefix == "OR") n = records_.size();
    else if (prefix == "PRB") n = problems_.size();
    else if (prefix == "REL") n = releases_.size();
    else if (prefix == "CHG") n = changes_.size();
    char buf[32];
    std::snprintf(buf, sizeof buf, "-%06zu", n + 1);
    return std::string(prefix) + buf;
}

const incident::Incident& State::incident(std::string_view id) const {
    const auto it = incidents_.find(std::string(id));
    if (it == incidents_.end()) throw NotFoundError("incident '" + std::string(id) + "' not found");
    return it->second;
}
const records::OutageRecord& State::record(std::string_view id) const {
    return find_or_throw(records_, id, "outage record");
}
const problem::ProblemTicket& State::problem(std::string_view id) const {
    return find_or_throw(problems_, id, "problem");
}
const change::Release& State::release(std::string_view id) const { return find_or_throw(releases_, id, "release"); }
const change::ChangeRequest& State::change(std::string_view id) const {
    return find_or_throw(changes_, id, "change request");
}

const records::OutageRecord* State::record_for_incident(std::string_view incident_id) const {
    const auto it = record_by_incident_.find(incident_id);
    return it == record_by_incident_.end() ? nullptr : &records_.find(it->second)->second;
}

const problem::ProblemTicket* State::problem_for_incident(std::string_view incident_id) const {
    const auto it = problem_by_incident_.find(incident_id);
    return it == problem_by_incident_.end() ? nullptr : &problems_.find(it->second)->second;
}

std::vector<incident::Incident> State::incident_list() const {
    std::vector<incident::Incident> out;
    out.reserve(incidents_.size());
    for (const auto& [_, v] : incidents_) out.push_back(v);
    return out;
}

Mutation State::prepare(const StoredEvent& e) const {
    try {
        return prepare_unchecked(e);
    } catch (const nlohmann::json::exception& err) {
        rethrow_as_validation(err, e.kind);
    }
}

Mutation State::prepare_unchecked(const StoredEvent& e) const {
    const Json& p = e.payload;
    const std::string_view kind = e.kind;
    const Timestamp now = e.at;
    Mutation m;

    if (kind == kinds::kIncidentOpened) {
        auto details = p.get<incident::IncidentDetails>();
        if (details.id.empty()) details.id = e.entity_id;
        if (incidents_.contains(details.id)) throw ValidationError("incident '" + details.id + "' already exists");
        m.incidents.push_back(incident::open_incident(details, config_->products, now));
    } else if (kind == kinds::kIncidentTransitioned) {
        const auto to = incident::parse_state(required<std::string>(p, "to"));
        const auto fields = p.contains("fields") ? p.at("fields").get<incident::TransitionFields>()
                                                 : incident::TransitionFields{};
        m.incidents.push_back(incident::transition(incident(e.entity_id), to, fields,
                                                   required<std::string>(p, "actor"), now, config_->products));
    } else if (kind == kinds::kIncidentClosed) {
        auto outcome =
            incident::close_incident(incident(e.entity_id), required<std::string>(p, "actor"), now, config_->policy);
        m.incidents.push_back(std::move(outcome.incident));
        m.outage_draft = std::move(outcome.outage_draft);
        m.problem_trigger = std::move(outcome.problem_trigger);
    } else if (kind == kinds::kAlertReceived) {
        const auto event = required<alerts::AlertEvent>(p, "event");
        const auto new_id = p.value("incident_id", next_id("INC"));
        auto r = alerts::ingest_alert(event, config_->monitors, incidents_, ledger_, now, new_id, config_->products);
        if (r.incident) m.incidents.push_back(std::move(*r.incident));
        m.alert = Mutation::AlertOutcome{event, r.kind, r.incident_id, r.duplicate, r.reason};
    } else if (kind == kinds::kRecordDrafted) {
        const auto draft = draft_from_json(p.at("draft"));
        // Redelivery of a draft for the same incident is a no-op.
        if (!record_by_incident_.contains(draft.incident_id)) {
            const auto id = p.value("record_id", next_id("OR"));
            if (records_.contains(id)) throw ValidationError("outage record '" + id + "' already exists");
            m.records.push_back(records::make_draft(id, draft));
        }
    } else if (kind == kinds::kRecordReviewed) {
        const auto decision = records::parse_review_decision(required<std::string>(p, "decision"));
        const auto edits = p.contains("edits") ? p.at("edits").get<records::ReviewEdits>() : records::ReviewEdits{};
        if (edits.product_ids) {
            for (const auto& id : *edits.product_ids) {
                if (!config_->products.contains(id)) throw ValidationError("unknown product '" + id + "'");
            }
        }
        auto outcome = records::review_outage(record(e.entity_id), decision, edits, required<std::string>(p, "reviewer"),
                                              p.value("note", ""), now);
        m.refresh_dashboard = outcome.refresh_dashboard;
        m.records.push_back(std::move(outcome.record));
    } else if (kind == kinds::kProblemSpawned) {
        const auto trigger = trigger_from_json(p.at("trigger"));
        if (!problem_by_incident_.contains(trigger.incident_id)) {
            const auto id = p.value("problem_id", next_id("PRB"));
            if (problems_.contains(id)) throw ValidationError("problem '" + id + "' already exists");
            auto ticket = problem::spawn_problem(id, trigger, config_->policy,
                                                 config_->resolver_for(trigger.product_ids), now,
                                                 config_->rca_sla_days);
            if (ticket) m.problems.push_back(std::move(*ticket));
        }
    } else if (kind == kinds::kRcaSubmitted) {
        m.problems.push_back(
            problem::submit_rca(problem(e.entity_id), required<problem::RcaDocument>(p, "rca"), now));
    } else if (kind == kinds::kRcaReviewed) {
        m.problems.push_back(problem::review_rca(problem(e.entity_id), required<std::string>(p, "reviewer"),
                                                 problem::parse_rca_decision(required<std::string>(p, "decision")),
                                                 p.value("note", ""), now));
    } else if (kind == kinds::kReleaseCreated) {
        const auto id = e.entity_id.empty() ? next_id("REL") : e.entity_id;
        if (releases_.contains(id)) throw ValidationError("release '" + id + "' already exists");
        m.releases.push_back(change::create_release(
            id, required<std::string>(p, "name"), optional_field<std::vector<std::string>>(p, "pbi_ids").value_or(
                                                      std::vector<std::string>{}),
            required<metrics::TimeInterval>(p, "target_window"),
            optional_field<std::vector<change::ChecklistItem>>(p, "prr").value_or(std::vector<change::ChecklistItem>{}),
            required<std::string>(p, "actor"), now));
    } else if (kind == kinds::kReleasePrrRun) {
        m.releases.push_back(change::run_prr(release(e.entity_id), updates_from_json(p.value("updates", Json::object())),
                                             required<std::string>(p, "actor"), now));
    } else if (kind == kinds::kReleaseApproved) {
        std::vector<change::ChangeRequest> attached;
        for (const auto& [_, c] : changes_) {
            if (c.release_id == e.entity_id) attached.push_back(c);
        }
        auto outcome = change::approve_release(release(e.entity_id), std::move(attached),
                                               required<std::string>(p, "actor"), config_->calendar, now);
        m.releases.push_back(std::move(outcome.release));
        for (auto& c : outcome.changes) {
            if (c != changes_.find(c.id)->second) m.changes.push_back(std::move(c));
        }
    } else if (kind == kinds::kReleaseDeployed) {
        m.releases.push_back(change::deploy_release(release(e.entity_id), required<std::string>(p, "actor"), now));
    } else if (kind == kinds::kReleaseCancelled) {
        m.releases.push_back(change::cancel_release(release(e.entity_id), required<std::string>(p, "actor"), now));
    } else if (kind == kinds::kChangeRequested) {
        const auto id = e.entity_id.empty() ? next_id("CHG") : e.entity_id;
        if (changes_.contains(id)) throw ValidationError("change request '" + id + "' already exists");
        auto draft = required<change::ChangeRequest>(p, "change");
        if (draft.release_id) release(*draft.release_id);
        for (const auto& pid : draft.product_ids) {
            if (!config_->products.contains(pid)) throw ValidationError("unknown product '" + pid + "'");
        }
        m.changes.push_back(change::request_change(id, std::move(draft), now));
    } else if (kind == kinds::kChangeReviewed) {
        m.changes.push_back(change::review_change(change(e.entity_id),
                                                  change::parse_change_decision(required<std::string>(p, "decision")),
                                                  required<std::string>(p, "actor"), now));
    } else if (kind == kinds::kChangeExecuted) {
        m.changes.push_back(change::execute_change(change(e.entity_id), required<std::string>(p, "actor"), now));
    } else if (kind == kinds::kChangeVerified) {
        m.changes.push_back(change::verify_change(change(e.entity_id), required<std::string>(p, "actor"), now));
    } else {
        throw ValidationError("unknown event kind '" + e.kind + "'");
    }
    return m;
}

void State::commit(const Mutation& m, std::uint64_t seq) {
    for (const auto& i : m.incidents) incidents_.insert_or_assign(i.id, i);
    for (const auto& r : m.records) {
        records_.insert_or_assign(r.id, r);
        record_by_incident_.insert_or_assign(r.incident_id, r.id);
    }
    for (const auto& t : m.problems) {
        problems_.insert_or_assign(t.id, t);
        problem_by_incident_.insert_or_assign(t.incident_id, t.id);
    }
    for (const auto& r : m.releases) releases_.insert_or_assign(r.id, r);
    for (const auto& c : m.changes) changes_.insert_or_assign(c.id, c);
    if (m.alert) ledger_.record(m.alert->event, m.alert->kind, m.alert->incident_id, m.alert->duplicate);
    last_seq_ = seq;
}

Json State::to_json() const {
    Json incidents = Json::array();
    for (const auto& [_, i] : incidents_) incidents.push_back(i);
    Json records = Json::array();
    for (const auto& [_, r] : records_) records.push_back(r);
    Json problems = Json::array();
    for (const auto& [_, t] : problems_) problems.push_back(t);
    Json releases = Json::array();
    for (const auto& [_, r] : releases_) releases.push_back(r);
    Json changes = Json::array();
    for (const auto& [_, c] : changes_) changes.push_back(c);
    return Json{{"last_seq", last_seq_}, {"incidents", incidents}, {"outage_records", records},
                {"problems", problems},  {"releases", releases},   {"changes", changes},
                {"alerts", ledger_.to_json()}};
}

State State::from_json(std::shared_ptr<const DomainConfig> config, const Json& j) {
    State s(std::move(config));
    try {
        s.last_seq_ = j.at("last_seq").get<std::uint64_t>();
        for (const auto& i : j.at("incidents")) {
            auto inc = i.get<incident::Incident>();
            s.incidents_.insert_or_assign(inc.id, std::move(inc));
        }
        for (const auto& r : j.at("outage_records")) {
            auto rec = records::record_from_json(r);
            s.record_by_incident_.insert_or_assign(rec.incident_id, rec.id);
            s.records_.insert_or_assign(rec.id, std::move(rec));
        }
        for (const auto& t : j.at("problems")) {
            auto ticket = problem::ticket_from_json(t);
            s.problem_by_incident_.insert_or_assign(ticket.incident_id, ticket.id);
            s.problems_.insert_or_assign(ticket.id, std::move(ticket));
        }
        for (const auto& r : j.at("releases")) {
            auto rel = change::release_from_json(r);
            s.releases_.insert_or_assign(rel.id, std::move(rel));
        }
        for (const auto& c : j.at("changes")) {
            auto chg = c.get<change::ChangeRequest>();
            s.changes_.insert_or_assign(chg.id, std::move(chg));
        }
        s.ledger_ = alerts::AlertLedger::from_json(j.at("alerts"));
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_validation(e, "snapshot");
    }
    return s;
}

}  // namespace availd::store
