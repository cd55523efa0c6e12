#include "availd/store/engine.hpp"

#include <fstream>
#include <sstream>

namespace availd::store {

Clock system_clock() {
    return [] { return std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now()); };
}

Json to_json(const AlertResult& r) {
    Json j{{"classification", alerts::to_string(r.kind)}, {"duplicate", r.duplicate}, {"seq", r.seq}};
    j["incident_id"] = r.incident_id.empty() ? Json(nullptr) : Json(r.incident_id);
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j;
}

Engine::Engine(std::shared_ptr<const DomainConfig> config, EventLog log, Clock clock,
               const std::optional<Json>& snapshot)
    : config_(std::move(config)), log_(std::move(log)), clock_(std::move(clock)), state_(config_) {
    if (log_.open_warning()) warnings_.push_back(*log_.open_warning());
    std::uint64_t from = 1;
    if (snapshot) {
        const auto seq = snapshot->at("state").at("last_seq").get<std::uint64_t>();
        if (seq <= log_.last_seq()) {
            state_ = State::from_json(config_, snapshot->at("state"));
            from = seq + 1;
        } else {
            warnings_.push_back("snapshot at seq " + std::to_string(seq) + " is ahead of the log (last seq " +
                                std::to_string(log_.last_seq()) + "); replaying from the start");
        }
    }
    for (const auto& e : log_.read(from)) {
        try {
            state_.apply(e);
        } catch (const Error& err) {
            throw ReplayError(e.seq, err.what());
        }
    }
    recover_follow_ups();
}

Engine::Applied Engine::execute(std::string_view kind, std::string entity_id, Json payload) {
    StoredEvent candidate{log_.last_seq() + 1, clock_(), std::string(kind), std::move(entity_id), std::move(payload),
                          kSchemaVersion};
    Mutation m = state_.prepare(candidate);
    StoredEvent stored = log_.append(std::move(candidate.kind), std::move(candidate.entity_id),
                                     std::move(candidate.payload), candidate.at);
    state_.commit(m, stored.seq);
    return {std::move(stored), std::move(m)};
}

void Engine::notify(bool refresh) {
    if (!refresh) return;
    std::function<void()> cb;
    {
        std::lock_guard lock(callback_mu_);
        cb = on_refresh_;
    }
    if (cb) cb();
}

void Engine::on_refresh(std::function<void()> callback) {
    std::lock_guard lock(callback_mu_);
    on_refresh_ = std::move(callback);
}

std::uint64_t Engine::last_seq() const {
    std::shared_lock lock(mu_);
    return log_.last_seq();
}

State Engine::state_copy() const {
    std::shared_lock lock(mu_);
    return state_;
}

incident::Incident Engine::open_incident(incident::IncidentDetails details) {
    std::unique_lock lock(mu_);
    details.id = state_.next_id("INC");
    const std::string id = details.id;
    execute(kinds::kIncidentOpened, id, details);
    return state_.incident(id);
}

incident::Incident Engine::transition_incident(const std::string& id, incident::State to,
                                               const incident::TransitionFields& fields, const std::string& actor) {
    if (to == incident::State::Closed) {
        return close_incident(id, actor).incident;
    }
    std::unique_lock lock(mu_);
    execute(kinds::kIncidentTransitioned, id,
            Json{{"to", incident::to_string(to)}, {"fields", fields}, {"actor", actor}});
    return state_.incident(id);
}

std::optional<records::OutageRecord> Engine::follow_draft(const incident::OutageRecordDraft& draft) {
    if (const auto* existing = state_.record_for_incident(draft.incident_id)) return *existing;
    const auto id = state_.next_id("OR");
    execute(kinds::kRecordDrafted, id,
            Json{{"record_id", id},
                 {"draft", {{"incident_id", draft.incident_id}, {"product_ids", draft.product_ids},
                            {"outage", draft.outage}}}});
    return state_.record(id);
}

std::optional<problem::ProblemTicket> Engine::follow_trigger(const incident::ProblemTrigger& trigger) {
    if (const auto* existing = state_.problem_for_incident(trigger.incident_id)) return *existing;
    const auto id = state_.next_id("PRB");
    const auto applied = execute(kinds::kProblemSpawned, id,
                                 Json{{"problem_id", id},
                                      {"trigger",
                                       {{"incident_id", trigger.incident_id},
                                        {"severity", trigger.severity},
                                        {"product_ids", trigger.product_ids},
                                        {"at", trigger.at}}}});
    if (applied.mutation.problems.empty()) return std::nullopt;
    return state_.problem(id);
}

void Engine::recover_follow_ups() {
    // A crash between a close and its follow-up events leaves the incident
    // flagged as emitted with nothing downstream; finish the job now.
    std::unique_lock lock(mu_);
    for (const auto& inc : state_.incident_list()) {
        if (inc.outage_record_emitted && !state_.record_for_incident(inc.id) && inc.lifecycle.occurred_at &&
            inc.lifecycle.restored_at) {
            follow_draft({inc.id, inc.product_ids,
                          metrics::TimeInterval{*inc.lifecycle.occurred_at, *inc.lifecycle.restored_at}});
            warnings_.push_back("re-issued outage record draft for " + inc.id);
        }
        if (inc.problem_trigger_emitted && !state_.problem_for_incident(inc.id)) {
            Timestamp at = inc.audit_trail.empty() ? Timestamp{} : inc.audit_trail.back().at;
            for (const auto& a : inc.audit_trail) {
                if (a.event == "closed") at = a.at;
            }
            follow_trigger({inc.id, inc.severity, inc.product_ids, at});
            warnings_.push_back("re-issued problem trigger for " + inc.id);
        }
    }
}

CloseResult Engine::close_incident(const std::string& id, const std::string& actor) {
    std::unique_lock lock(mu_);
    const auto applied = execute(kinds::kIncidentClosed, id, Json{{"actor", actor}});
    CloseResult result{state_.incident(id), std::nullopt, std::nullopt};
    if (applied.mutation.outage_draft) result.record = follow_draft(*applied.mutation.outage_draft);
    if (applied.mutation.problem_trigger) result.problem = follow_trigger(*applied.mutation.problem_trigger);
    return result;
}

AlertResult Engine::ingest_alert(const alerts::AlertEvent& event) {
    std::unique_lock lock(mu_);
    const auto new_id = state_.next_id("INC");
    const auto applied =
        execute(kinds::kAlertReceived, event.monitor_id, Json{{"event", event}, {"incident_id", new_id}});
    const auto& a = *applied.mutation.alert;
    return AlertResult{a.kind, a.incident_id, a.duplicate, a.reason, applied.event.seq};
}

records::OutageRecord Engine::deliver_outage_draft(const incident::OutageRecordDraft& draft) {
    std::unique_lock lock(mu_);
    state_.incident(draft.incident_id);
    return *follow_draft(draft);
}

std::optional<problem::ProblemTicket> Engine::deliver_problem_trigger(const incident::ProblemTrigger& trigger) {
    std::unique_lock lock(mu_);
    state_.incident(trigger.incident_id);
    return follow_trigger(trigger);
}

records::OutageRecord Engine::review_outage(const std::string& record_id, records::ReviewDecision decision,
                                            const records::ReviewEdits& edits, const std::string& reviewer,
                                            const std::string& note) {
    bool refresh = false;
    records::OutageRecord out = [&] {
        std::unique_lock lock(mu_);
        const auto applied = execute(kinds::kRecordReviewed, record_id,
                                     Json{{"decision", decision == records::ReviewDecision::Confirm ? "confirm" : "reject"},
                                          {"edits", edits},
                                          {"reviewer", reviewer},
                                          {"note", note}});
        refresh = applied.mutation.refresh_dashboard;
        return state_.record(record_id);
    }();
    notify(refresh);
    return out;
}

problem::ProblemTicket Engine::submit_rca(const std::string& problem_id, const problem::RcaDocument& rca) {
    std::unique_lock lock(mu_);
    execute(kinds::kRcaSubmitted, problem_id, Json{{"rca", rca}});
    return state_.problem(problem_id);
}

problem::ProblemTicket Engine::review_rca(const std::string& problem_id, const std::string& reviewer,
                                          problem::ReviewDecision decision, const std::string& note) {
    std::unique_lock lock(mu_);
    execute(kinds::kRcaReviewed, problem_id,
            Json{{"reviewer", reviewer},
                 {"decision", decision == problem::ReviewDecision::Approve ? "approve" : "reject"},
                 {"note", note}});
    return state_.problem(problem_id);
}

change::Release Engine::create_release(const std::string& name, const std::vector<std::string>& pbi_ids,
                                       const metrics::TimeInterval& target_window,
                                       const std::vector<change::ChecklistItem>& prr, const std::string& actor) {
    std::unique_lock lock(mu_);
    const auto id = state_.next_id("REL");
    execute(kinds::kReleaseCreated, id,
            Json{{"name", name}, {"pbi_ids", pbi_ids}, {"target_window", target_window}, {"prr", prr}, {"actor", actor}});
    return state_.release(id);
}

change::Release Engine::run_prr(const std::string& release_id, const Json& updates, const std::string& actor) {
    std::unique_lock lock(mu_);
    execute(kinds::kReleasePrrRun, release_id, Json{{"updates", updates}, {"actor", actor}});
    return state_.release(release_id);
}

change::Release Engine::approve_release(const std::string& release_id, const std::string& actor) {
    std::unique_lock lock(mu_);
    execute(kinds::kReleaseApproved, release_id, Json{{"actor", actor}});
    return state_.release(release_id);
}

change::Release Engine::deploy_release(const std::string& release_id, const std::string& actor) {
    std::unique_lock lock(mu_);
    execute(kinds::kReleaseDeployed, release_id, Json{{"actor", actor}});
    return state_.release(release_id);
}

change::Release Engine::cancel_release(const std::string& release_id, const std::string& actor) {
    std::unique_lock lock(mu_);
    execute(kinds::kReleaseCancelled, release_id, Json{{"actor", actor}});
    return state_.release(release_id);
}

change::ChangeRequest Engine::request_change(const change::ChangeRequest& draft) {
    std::unique_lock lock(mu_);
    const auto id = state_.next_id("CHG");
    Json body = draft;
    body.erase("id");
    body.erase("state");
    body.erase("history");
    execute(kinds::kChangeRequested, id, Json{{"change", body}});
    return state_.change(id);
}

change::ChangeRequest Engine::review_change(const std::string& change_id, change::ChangeDecision decision,
                                            const std::string& actor) {
    std::unique_lock lock(mu_);
    execute(kinds::kChangeReviewed, change_id,
            Json{{"decision", decision == change::ChangeDecision::Approve ? "approve" : "reject"}, {"actor", actor}});
    return state_.change(change_id);
}

change::ChangeRequest Engine::execute_change(const std::string& change_id, const std::string& actor) {
    std::unique_lock lock(mu_);
    execute(kinds::kChangeExecuted, change_id, Json{{"actor", actor}});
    return state_.change(change_id);
}

change::ChangeRequest Engine::verify_change(const std::string& change_id, const std::string& actor) {
    std::unique_lock lock(mu_);
    execute(kinds::kChangeVerified, change_id, Json{{"actor", actor}});
    return state_.change(change_id);
}

std::vector<StoredEvent> Engine::export_events(std::uint64_t from_seq) const {
    std::shared_lock lock(mu_);
    return log_.read(from_seq);
}

std::size_t Engine::import_events(const std::vector<StoredEvent>& events) {
    bool refresh = false;
    std::size_t added = 0;
    {
        std::unique_lock lock(mu_);
        const auto existing = log_.read();
        State trial = state_;
        std::vector<const StoredEvent*> fresh;
        std::uint64_t next = log_.last_seq() + 1;
        for (const auto& e : events) {
            if (e.seq == 0) throw ValidationError("imported event has seq 0");
            if (e.seq <= existing.size()) {
                if (!(existing[e.seq - 1] == e)) {
                    throw StoreError("seq " + std::to_string(e.seq) + " conflicts with the existing log",
                                     {"conflicting_seq:" + std::to_string(e.seq)});
                }
                continue;
            }
            if (e.seq != next) {
                throw StoreError("imported seq " + std::to_string(e.seq) + " does not continue the log at " +
                                 std::to_string(next));
            }
            try {
                const Mutation m = trial.prepare(e);
                refresh = refresh || m.refresh_dashboard;
                trial.commit(m, e.seq);
            } catch (const Error& err) {
                throw ValidationError("imported seq " + std::to_string(e.seq) + " rejected: " + err.what());
            }
            fresh.push_back(&e);
            ++next;
        }
        for (const auto* e : fresh) log_.append_existing(*e);
        state_ = std::move(trial);
        added = fresh.size();
    }
    notify(refresh);
    return added;
}

Json Engine::snapshot() const {
    std::shared_lock lock(mu_);
    return Json{{"schema_version", kSchemaVersion}, {"state", state_.to_json()}};
}

void Engine::write_snapshot(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << snapshot().dump() << '\n';
        out.flush();
        if (!out) throw StoreError("cannot write snapshot " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw StoreError("cannot install snapshot " + path.string() + ": " + ec.message());
}

std::optional<Json> load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::exception& e) {
        throw StoreError("unreadable snapshot " + path.string() + ": " + e.what());
    }
}

}  // namespace availd::store
