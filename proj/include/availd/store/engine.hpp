#pragma once

// Single-writer command engine over the event log. Each command is prepared
// against the current state, appended durably, then committed; a failed
// append leaves both the log and the state untouched.

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "availd/store/event_log.hpp"
#include "availd/store/state.hpp"

namespace availd::store {

using Clock = std::function<Timestamp()>;
Clock system_clock();

struct CloseResult {
    incident::Incident incident;
    std::optional<records::OutageRecord> record;
    std::optional<problem::ProblemTicket> problem;
};

struct AlertResult {
    alerts::Classification kind;
    std::string incident_id;
    bool duplicate = false;
    std::string reason;
    std::uint64_t seq = 0;
};

Json to_json(const AlertResult& r);

class Engine {
public:
    /// Replays `log` (after `snapshot`, when one is given and not ahead of
    /// the log). Throws ReplayError on a corrupt log.
    Engine(std::shared_ptr<const DomainConfig> config, EventLog log, Clock clock,
           const std::optional<Json>& snapshot = std::nullopt);

    incident::Incident open_incident(incident::IncidentDetails details);
    incident::Incident transition_incident(const std::string& id, incident::State to,
                                           const incident::TransitionFields& fields, const std::string& actor);
    /// Also drafts the outage record and spawns the problem ticket when due.
    CloseResult close_incident(const std::string& id, const std::string& actor);

    /// Every firing is logged, including rejections and redeliveries.
    AlertResult ingest_alert(const alerts::AlertEvent& event);

    /// Idempotent per incident: a redelivered draft returns the existing record.
    records::OutageRecord deliver_outage_draft(const incident::OutageRecordDraft& draft);
    std::optional<problem::ProblemTicket> deliver_problem_trigger(const incident::ProblemTrigger& trigger);

    records::OutageRecord review_outage(const std::string& record_id, records::ReviewDecision decision,
                                        const records::ReviewEdits& edits, const std::string& reviewer,
                                        const std::string& note);

    problem::ProblemTicket submit_rca(const std::string& problem_id, const problem::RcaDocument& rca);
    problem::ProblemTicket review_rca(const std::string& problem_id, const std::string& reviewer,
                                      problem::ReviewDecision decision, const std::string& note);

    change::Release create_release(const std::string& name, const std::vector<std::string>& pbi_ids,
                                   const metrics::TimeInterval& target_window,
                                   const std::vector<change::ChecklistItem>& prr, const std::string& actor);
    change::Release run_prr(const std::string& release_id, const Json& updates, const std::string& actor);
    change::Release approve_release(const std::string& release_id, const std::string& actor);
    change::Release deploy_release(const std::string& release_id, const std::string& actor);
    change::Release cancel_release(const std::string& release_id, const std::string& actor);

    change::ChangeRequest request_change(const change::ChangeRequest& draft);
    change::ChangeRequest review_change(const std::string& change_id, change::ChangeDecision decision,
                                        const std::string& actor);
    change::ChangeRequest execute_change(const std::string& change_id, const std::string& actor);
    change::ChangeRequest verify_change(const std::string& change_id, const std::string& actor);

    /// Runs `f` with shared access to the current state.
    template <class F>
    auto read(F&& f) const {
        std::shared_lock lock(mu_);
        return f(state_);
    }
    State state_copy() const;

    std::vector<StoredEvent> export_events(std::uint64_t from_seq = 1) const;
    /// Append-only merge. Events already present must match exactly; new ones
    /// must continue the sequence and pass validation. All or nothing.
    std::size_t import_events(const std::vector<StoredEvent>& events);

    Json snapshot() const;
    void write_snapshot(const std::filesystem::path& path) const;

    /// Called (outside the engine lock) after an outage record is confirmed.
    void on_refresh(std::function<void()> callback);

    Timestamp now() const { return clock_(); }
    std::uint64_t last_seq() const;
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct Applied {
        StoredEvent event;
        Mutation mutation;
    };

    /// Caller holds the write lock.
    Applied execute(std::string_view kind, std::string entity_id, Json payload);
    std::optional<records::OutageRecord> follow_draft(const incident::OutageRecordDraft& draft);
    std::optional<problem::ProblemTicket> follow_trigger(const incident::ProblemTrigger& trigger);
    void recover_follow_ups();
    void notify(bool refresh);

    std::shared_ptr<const DomainConfig> config_;
    EventLog log_;
    Clock clock_;
    mutable std::shared_mutex mu_;
    State state_;
    std::vector<std::string> warnings_;
    std::mutex callback_mu_;
    std::function<void()> on_refresh_;
};

/// Reads `path` if it exists.
std::optional<Json> load_snapshot(const std::filesystem::path& path);

}  // namespace availd::store
