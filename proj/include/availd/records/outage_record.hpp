#pragma once

#include <optional>
#include <string>
#include <vector>

#include "availd/core/json.hpp"
#include "availd/core/metrics.hpp"
#include "availd/incident/incident.hpp"

namespace availd::records {

enum class RecordState { Draft, Confirmed, Rejected };
enum class ReviewDecision { Confirm, Reject };

std::string to_string(RecordState s);
RecordState parse_record_state(const std::string& text);
ReviewDecision parse_review_decision(const std::string& text);

/// Reviewed statement of downtime. The only input to availability figures.
struct OutageRecord {
    std::string id;
    std::string incident_id;
    std::vector<std::string> product_ids;
    metrics::TimeInterval outage;
    RecordState state = RecordState::Draft;
    std::string reviewer;
    std::string review_note;
    std::optional<Timestamp> reviewed_at;
    /// Values as drafted from the incident, kept when a review edits them.
    metrics::TimeInterval drafted_outage;
    std::vector<std::string> drafted_product_ids;

    friend bool operator==(const OutageRecord&, const OutageRecord&) = default;
};

struct ReviewEdits {
    std::optional<metrics::TimeInterval> outage;
    std::optional<std::vector<std::string>> product_ids;
};

struct ReviewOutcome {
    OutageRecord record;
    /// True when the dashboard must be recomputed (a confirmation).
    bool refresh_dashboard = false;
};

OutageRecord make_draft(std::string id, const incident::OutageRecordDraft& draft);

/// Draft -> Confirmed (edits applied first) or Draft -> Rejected (note required).
/// Throws WorkflowError when the record is not a Draft.
ReviewOutcome review_outage(OutageRecord record, ReviewDecision decision, const ReviewEdits& edits,
                            const std::string& reviewer, const std::string& note, Timestamp now);

/// Confirmed outages naming `product_id`, clipped to `period`, ordered by start.
std::vector<metrics::TimeInterval> downtime_ledger(const std::vector<OutageRecord>& records,
                                                   const std::string& product_id,
                                                   const metrics::TimeInterval& period);

void to_json(Json& j, const OutageRecord& r);
OutageRecord record_from_json(const Json& j);
void to_json(Json& j, const ReviewEdits& e);
void from_json(const Json& j, ReviewEdits& e);

}  // namespace availd::records

namespace nlohmann {
template <>
struct adl_serializer<availd::records::OutageRecord> {
    static void to_json(json& j, const availd::records::OutageRecord& r) { availd::records::to_json(j, r); }
    static availd::records::OutageRecord from_json(const json& j) { return availd::records::record_from_json(j); }
};
}  // namespace nlohmann
