#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "availd/core/json.hpp"
#include "availd/incident/incident.hpp"

namespace availd::alerts {

enum class MonitorLayer { Infrastructure, ExternalProbe, Apm, CustomLog };
enum class Comparator { Greater, GreaterEqual, Less, LessEqual };
enum class Classification { Created, Attached, Ignored, Rejected };

std::string to_string(MonitorLayer l);
std::string to_string(Comparator c);
std::string to_string(Classification c);
MonitorLayer parse_layer(const std::string& text);
Comparator parse_comparator(const std::string& text);
Classification parse_classification(const std::string& text);

struct MonitorProfile {
    std::string monitor_id;
    std::string product_id;
    MonitorLayer layer = MonitorLayer::ExternalProbe;
    std::string metric;
    Comparator comparator = Comparator::Greater;
    double threshold = 0.0;
    incident::Severity severity_on_fire = incident::Severity::Sev2;
    Seconds dedup_window{1800};
    /// Whether incidents opened by this monitor are outages. Defaults to true
    /// for external probes, false for the other layers.
    bool opens_outage = true;

    bool violated_by(double value) const;
};

/// Throws ValidationError when dedup_window <= 0 or ids are missing.
void validate(const MonitorProfile& profile);

struct AlertEvent {
    std::string monitor_id;
    Timestamp fired_at;
    double value = 0.0;
    std::string message;
    friend bool operator==(const AlertEvent&, const AlertEvent&) = default;
};

using MonitorCatalog = std::map<std::string, MonitorProfile, std::less<>>;

struct Counters {
    std::uint64_t created = 0;
    std::uint64_t attached = 0;
    std::uint64_t ignored = 0;
    std::uint64_t rejected = 0;
    /// Redelivered events (also counted in their original bucket).
    std::uint64_t duplicates = 0;

    std::uint64_t received() const { return created + attached + ignored + rejected; }
    friend bool operator==(const Counters&, const Counters&) = default;
};

/// Dedup state: which incident each monitor is feeding, and every event seen.
class AlertLedger {
public:
    struct Active {
        std::string incident_id;
        Timestamp last_fired_at;
        friend bool operator==(const Active&, const Active&) = default;
    };
    struct Seen {
        Classification kind;
        std::string incident_id;
        friend bool operator==(const Seen&, const Seen&) = default;
    };

    const Counters& counters() const { return counters_; }
    const std::map<std::string, Active>& active() const { return active_; }
    const Seen* seen(const std::string& monitor_id, Timestamp fired_at) const;

    /// Folds one ingestion result into the ledger.
    void record(const AlertEvent& event, Classification kind, const std::string& incident_id, bool duplicate);

    friend bool operator==(const AlertLedger&, const AlertLedger&) = default;

    Json to_json() const;
    static AlertLedger from_json(const Json& j);

private:
    Counters counters_;
    std::map<std::string, Active> active_;
    std::map<std::pair<std::string, std::int64_t>, Seen> seen_;
};

struct IngestResult {
    Classification kind = Classification::Ignored;
    /// Incident created or attached to (empty for ignored/rejected without an open incident).
    std::string incident_id;
    /// The new or annotated incident, when the ingestion changed one.
    std::optional<incident::Incident> incident;
    bool duplicate = false;
    std::string reason;
};

/// Classifies one firing. A threshold violation attaches to the monitor's open
/// incident when the previous firing lies within the dedup window, and opens
/// a new alert-sourced incident otherwise. Non-violating firings are ignored,
/// and leave a recovery note on the monitor's open incident if there is one.
/// A firing already seen (same monitor and fired_at) returns its earlier
/// classification with no side effects. Unknown monitors yield Rejected.
IngestResult ingest_alert(const AlertEvent& event, const MonitorCatalog& monitors,
                          const std::map<std::string, incident::Incident>& incidents, const AlertLedger& ledger,
                          Timestamp now, const std::string& new_incident_id,
                          const incident::ProductSet& known_products);

/// One `monitor` directive of a probe scenario.
struct ScenarioMonitor {
    std::string id;
    Seconds interval;
};

struct ProbeScenario {
    std::vector<ScenarioMonitor> monitors;
    std::map<std::string, std::vector<metrics::TimeInterval>> down;
};

/// Parses the line-oriented scenario format (see docs/scenario-format.md).
/// Throws ParseError carrying the 1-based line number.
ProbeScenario parse_probe_scenario(std::string_view text);

/// Deterministic firings: one per probe tick (epoch-aligned multiples of the
/// monitor interval) inside each down interval, ordered by time then monitor.
std::vector<AlertEvent> run_probe_scenario(const ProbeScenario& scenario);
std::vector<AlertEvent> run_probe_scenario(std::string_view text);

void to_json(Json& j, const MonitorProfile& p);
void from_json(const Json& j, MonitorProfile& p);
void to_json(Json& j, const AlertEvent& e);
void from_json(const Json& j, AlertEvent& e);
void to_json(Json& j, const Counters& c);

}  // namespace availd::alerts
