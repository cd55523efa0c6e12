#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "availd/core/json.hpp"
#include "availd/core/metrics.hpp"
#include "availd/core/time.hpp"

namespace availd::incident {

enum class Severity { Sev1, Sev2, Sev3, Sev4 };
enum class State { New, Classified, InProgress, Resolved, Closed };
enum class Source { Alert, Manual };

std::string to_string(Severity s);
std::string to_string(State s);
std::string to_string(Source s);
Severity parse_severity(const std::string& text);
State parse_state(const std::string& text);
Source parse_source(const std::string& text);

inline constexpr std::array<State, 5> kAllStates{State::New, State::Classified, State::InProgress, State::Resolved,
                                                 State::Closed};

using ProductSet = std::set<std::string, std::less<>>;

/// Which severities count as "high" / "significant". Drives both the
/// availability-record draft and the problem-ticket trigger.
struct SeverityPolicy {
    std::set<Severity> significant{Severity::Sev1, Severity::Sev2};

    bool is_significant(Severity s) const { return significant.contains(s); }
};

/// Figure-1 lifecycle. Present values are non-decreasing in declaration order.
struct Lifecycle {
    std::optional<Timestamp> occurred_at;
    std::optional<Timestamp> detected_at;
    std::optional<Timestamp> diagnosed_at;
    std::optional<Timestamp> repaired_at;
    std::optional<Timestamp> recovered_at;
    std::optional<Timestamp> restored_at;

    friend bool operator==(const Lifecycle&, const Lifecycle&) = default;
};

struct AuditEntry {
    Timestamp at;
    std::string actor;
    std::string event;
    Json detail;

    friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

struct Incident {
    std::string id;
    std::vector<std::string> product_ids;
    Severity severity = Severity::Sev4;
    State state = State::New;
    bool causes_outage = false;
    Lifecycle lifecycle;
    Source source = Source::Manual;
    std::optional<std::string> monitor_id;
    std::string title;
    std::string description;
    std::vector<AuditEntry> audit_trail;
    /// Set once close has emitted the respective workflow output.
    bool outage_record_emitted = false;
    bool problem_trigger_emitted = false;

    friend bool operator==(const Incident&, const Incident&) = default;
};

struct IncidentDetails {
    std::string id;
    std::vector<std::string> product_ids;
    Severity severity = Severity::Sev3;
    bool causes_outage = false;
    Source source = Source::Manual;
    std::optional<std::string> monitor_id;
    std::string title;
    std::string description;
    std::optional<Timestamp> occurred_at;
    std::string actor;
};

/// Optional edits carried by a transition. Timestamp fields extend the lifecycle.
struct TransitionFields {
    std::optional<Severity> severity;
    std::optional<bool> causes_outage;
    std::optional<std::vector<std::string>> product_ids;
    std::optional<Timestamp> occurred_at;
    std::optional<Timestamp> diagnosed_at;
    std::optional<Timestamp> repaired_at;
    std::optional<Timestamp> recovered_at;
    std::optional<Timestamp> restored_at;
    std::string note;
};

struct TransitionRule {
    State from;
    State to;
    /// Lifecycle fields that must be present after the transition when the
    /// incident causes an outage.
    std::vector<std::string> required_for_outage;

    std::string name() const { return "incident:" + to_string(from) + "->" + to_string(to); }
};

/// The complete incident transition table.
const std::vector<TransitionRule>& transition_table();
const TransitionRule* find_rule(State from, State to);

/// Draft availability record emitted when a high-severity outage incident closes.
struct OutageRecordDraft {
    std::string incident_id;
    std::vector<std::string> product_ids;
    metrics::TimeInterval outage;
};

struct ProblemTrigger {
    std::string incident_id;
    Severity severity;
    std::vector<std::string> product_ids;
    Timestamp at;
};

struct CloseOutcome {
    Incident incident;
    std::optional<OutageRecordDraft> outage_draft;
    std::optional<ProblemTrigger> problem_trigger;
};

Incident open_incident(const IncidentDetails& details, const ProductSet& known_products, Timestamp now);

/// Throws StateMachineError when (state, to) is not a table row and
/// ValidationError on missing fields, unknown products or lifecycle disorder.
Incident transition(Incident incident, State to, const TransitionFields& fields, const std::string& actor,
                    Timestamp now, const ProductSet& known_products);

/// Resolved -> Closed, emitting each workflow output at most once per incident.
CloseOutcome close_incident(Incident incident, const std::string& actor, Timestamp now,
                            const SeverityPolicy& policy);

/// Appends a non-state audit event, e.g. an alert firing attached by dedup.
Incident annotate(Incident incident, const std::string& actor, Timestamp at, const std::string& event,
                  Json detail);

/// Rebuilds an incident purely from its audit trail.
Incident replay_audit(const std::vector<AuditEntry>& trail, const ProductSet& known_products,
                      const SeverityPolicy& policy);

/// Throws ValidationError naming the first out-of-order pair.
void check_lifecycle_order(const Lifecycle& lifecycle);

struct DurationDistribution {
    std::size_t count = 0;
    Seconds total{0};
    Seconds min{0};
    Seconds max{0};
    double mean_seconds = 0.0;
    double median_seconds = 0.0;
    /// Buckets: <15m, <1h, <4h, <24h, >=24h.
    std::array<std::size_t, 5> buckets{};
};

struct IncidentStatistics {
    std::size_t total = 0;
    std::map<std::string, std::size_t> by_severity;
    std::map<std::string, std::size_t> by_source;
    std::map<std::string, std::size_t> by_product;
    DurationDistribution outage_durations;
};

/// Counts incidents detected within `period`; durations are restored - occurred
/// for outage incidents that have been restored.
IncidentStatistics incident_statistics(const std::vector<Incident>& incidents, const metrics::TimeInterval& period);

void to_json(Json& j, const Lifecycle& l);
void from_json(const Json& j, Lifecycle& l);
void to_json(Json& j, const AuditEntry& a);
void from_json(const Json& j, AuditEntry& a);
void to_json(Json& j, const Incident& i);
void from_json(const Json& j, Incident& i);
void to_json(Json& j, const IncidentDetails& d);
void from_json(const Json& j, IncidentDetails& d);
void to_json(Json& j, const TransitionFields& f);
void from_json(const Json& j, TransitionFields& f);
void to_json(Json& j, const IncidentStatistics& s);

}  // namespace availd::incident

namespace nlohmann {
template <>
struct adl_serializer<availd::incident::Severity> {
    static void to_json(json& j, availd::incident::Severity s) { j = availd::incident::to_string(s); }
    static void from_json(const json& j, availd::incident::Severity& s) {
        s = availd::incident::parse_severity(j.get<std::string>());
    }
};
template <>
struct adl_serializer<availd::incident::State> {
    static void to_json(json& j, availd::incident::State s) { j = availd::incident::to_string(s); }
    static void from_json(const json& j, availd::incident::State& s) {
        s = availd::incident::parse_state(j.get<std::string>());
    }
};
template <>
struct adl_serializer<availd::incident::Source> {
    static void to_json(json& j, availd::incident::Source s) { j = availd::incident::to_string(s); }
    static void from_json(const json& j, availd::incident::Source& s) {
        s = availd::incident::parse_source(j.get<std::string>());
    }
};
}  // namespace nlohmann
