#pragma once

// Materialized view of the event log. Every mutation is an event; applying
// the same events to an empty State always yields the same State.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "availd/alerts/alerts.hpp"
#include "availd/change/change.hpp"
#include "availd/incident/incident.hpp"
#include "availd/problem/problem.hpp"
#include "availd/records/outage_record.hpp"
#include "availd/store/event_log.hpp"

namespace availd::store {

/// Configuration the event handlers consult. Replay needs the same values
/// the live service used.
struct DomainConfig {
    incident::ProductSet products;
    /// Problem resolver per product; the first product of an incident decides.
    std::map<std::string, problem::Resolver, std::less<>> resolvers;
    problem::Resolver default_resolver{"problem-manager", {}};
    alerts::MonitorCatalog monitors;
    incident::SeverityPolicy policy;
    int rca_sla_days = problem::kDefaultRcaSlaDays;
    change::ReleaseCalendar calendar;

    const problem::Resolver& resolver_for(const std::vector<std::string>& product_ids) const;
};

namespace kinds {
inline constexpr std::string_view kIncidentOpened = "incident.opened";
inline constexpr std::string_view kIncidentTransitioned = "incident.transitioned";
inline constexpr std::string_view kIncidentClosed = "incident.closed";
inline constexpr std::string_view kAlertReceived = "alert.received";
inline constexpr std::string_view kRecordDrafted = "outage_record.drafted";
inline constexpr std::string_view kRecordReviewed = "outage_record.reviewed";
inline constexpr std::string_view kProblemSpawned = "problem.spawned";
inline constexpr std::string_view kRcaSubmitted = "problem.rca_submitted";
inline constexpr std::string_view kRcaReviewed = "problem.reviewed";
inline constexpr std::string_view kReleaseCreated = "release.created";
inline constexpr std::string_view kReleasePrrRun = "release.prr_run";
inline constexpr std::string_view kReleaseApproved = "release.approved";
inline constexpr std::string_view kReleaseDeployed = "release.deployed";
inline constexpr std::string_view kReleaseCancelled = "release.cancelled";
inline constexpr std::string_view kChangeRequested = "change.requested";
inline constexpr std::string_view kChangeReviewed = "change.reviewed";
inline constexpr std::string_view kChangeExecuted = "change.executed";
inline constexpr std::string_view kChangeVerified = "change.verified";
}  // namespace kinds

/// The entities one event produces, computed without touching the State.
struct Mutation {
    struct AlertOutcome {
        alerts::AlertEvent event;
        alerts::Classification kind;
        std::string incident_id;
        bool duplicate = false;
        std::string reason;
    };

    std::vector<incident::Incident> incidents;
    std::vector<records::OutageRecord> records;
    std::vector<problem::ProblemTicket> problems;
    std::vector<change::Release> releases;
    std::vector<change::ChangeRequest> changes;
    std::optional<AlertOutcome> alert;
    /// Follow-up work the engine turns into further events.
    std::optional<incident::OutageRecordDraft> outage_draft;
    std::optional<incident::ProblemTrigger> problem_trigger;
    bool refresh_dashboard = false;

    bool empty() const {
        return incidents.empty() && records.empty() && problems.empty() && releases.empty() && changes.empty() &&
               !alert;
    }
};

class State {
public:
    template <class T>
    using ById = std::map<std::string, T, std::less<>>;

    explicit State(std::shared_ptr<const DomainConfig> config);

    /// Validates `event` against the current state. Throws the domain error
    /// the command would have raised; the State is unchanged either way.
    Mutation prepare(const StoredEvent& event) const;
    void commit(const Mutation& m, std::uint64_t seq);
    void apply(const StoredEvent& event) { commit(prepare(event), event.seq); }

    /// Next identifier for a prefix such as "INC"; entities are never deleted.
    std::string next_id(std::string_view prefix) const;

    const DomainConfig& config() const { return *config_; }
    std::uint64_t last_seq() const { return last_seq_; }
    const std::map<std::string, incident::Incident>& incidents() const { return incidents_; }
    const ById<records::OutageRecord>& records() const { return records_; }
    const ById<problem::ProblemTicket>& problems() const { return problems_; }
    const ById<change::Release>& releases() const { return releases_; }
    const ById<change::ChangeRequest>& changes() const { return changes_; }
    const alerts::AlertLedger& alert_ledger() const { return ledger_; }

    /// Throw NotFoundError for unknown ids.
    const incident::Incident& incident(std::string_view id) const;
    const records::OutageRecord& record(std::string_view id) const;
    const problem::ProblemTicket& problem(std::string_view id) const;
    const change::Release& release(std::string_view id) const;
    const change::ChangeRequest& change(std::string_view id) const;

    const records::OutageRecord* record_for_incident(std::string_view incident_id) const;
    const problem::ProblemTicket* problem_for_incident(std::string_view incident_id) const;

    template <class T>
    static std::vector<T> values(const std::map<std::string, T, std::less<>>& m) {
        std::vector<T> out;
        out.reserve(m.size());
        for (const auto& [_, v] : m) out.push_back(v);
        return out;
    }
    std::vector<incident::Incident> incident_list() const;

    Json to_json() const;
    static State from_json(std::shared_ptr<const DomainConfig> config, const Json& j);

private:
    Mutation prepare_unchecked(const StoredEvent& event) const;

    std::shared_ptr<const DomainConfig> config_;
    std::uint64_t last_seq_ = 0;
    std::map<std::string, incident::Incident> incidents_;
    ById<records::OutageRecord> records_;
    ById<problem::ProblemTicket> problems_;
    ById<change::Release> releases_;
    ById<change::ChangeRequest> changes_;
    alerts::AlertLedger ledger_;
    std::map<std::string, std::string, std::less<>> record_by_incident_;
    std::map<std::string, std::string, std::less<>> problem_by_incident_;
};

}  // namespace availd::store
