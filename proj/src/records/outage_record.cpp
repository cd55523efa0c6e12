#include "availd/records/outage_record.hpp"

#include <algorithm>

#include "availd/core/error.hpp"

namespace availd::records {

std::string to_string(RecordState s) {
    switch (s) {
        case RecordState::Draft: return "Draft";
        case RecordState::Confirmed: return "Confirmed";
        case RecordState::Rejected: return "Rejected";
    }
    return "unknown";
}

RecordState parse_record_state(const std::string& text) {
    for (auto s : {RecordState::Draft, RecordState::Confirmed, RecordState::Rejected}) {
        if (to_string(s) == text) return s;
    }
    throw ValidationError("unknown outage record state '" + text + "'");
}

ReviewDecision parse_review_decision(const std::string& text) {
    if (text == "confirm") return ReviewDecision::Confirm;
    if (text == "reject") return ReviewDecision::Reject;
    throw ValidationError("review decision must be 'confirm' or 'reject', got '" + text + "'");
}

OutageRecord make_draft(std::string id, const incident::OutageRecordDraft& draft) {
    if (draft.product_ids.empty()) throw ValidationError("outage record needs at least one product");
    return OutageRecord{std::move(id), draft.incident_id, draft.product_ids, draft.outage, RecordState::Draft,
                        {}, {}, std::nullopt, draft.outage, draft.product_ids};
}

ReviewOutcome review_outage(OutageRecord record, ReviewDecision decision, const ReviewEdits& edits,
                            const std::string& reviewer, const std::string& note, Timestamp now) {
    if (record.state != RecordState::Draft) {
        throw WorkflowError("outage record " + record.id + " is " + to_string(record.state) +
                            "; only Draft records can be reviewed");
    }
    if (reviewer.empty()) throw ValidationError("review requires a reviewer");
    bool refresh = false;
    if (decision == ReviewDecision::Reject) {
        if (note.empty()) throw ValidationError("rejecting an outage record requires a review note");
        record.state = RecordState::Rejected;
    } else {
        if (edits.outage) record.outage = *edits.outage;
        if (edits.product_ids) {
            if (edits.product_ids->empty()) throw ValidationError("outage record needs at least one product");
            record.product_ids = *edits.product_ids;
        }
        record.state = RecordState::Confirmed;
        refresh = true;
    }
    record.reviewer = reviewer;
    record.review_note = note;
    record.reviewed_at = now;
    return ReviewOutcome{std::move(record), refresh};
}

std::vector<metrics::TimeInterval> downtime_ledger(const std::vector<OutageRecord>& records,
                                                   const std::string& product_id,
                                                   const metrics::TimeInterval& period) {
    std::vector<metrics::TimeInterval> ledger;
    for (const auto& r : records) {
        if (r.state != RecordState::Confirmed) continue;
        if (std::find(r.product_ids.begin(), r.product_ids.end(), product_id) == r.product_ids.end()) continue;
        if (auto clipped = r.outage.clipped_to(period)) ledger.push_back(*clipped);
    }
    std::sort(ledger.begin(), ledger.end(), [](const auto& a, const auto& b) {
        return a.start() < b.start() || (a.start() == b.start() && a.end() < b.end());
    });
    return ledger;
}

void to_json(Json& j, const OutageRecord& r) {
    j = Json{{"id", r.id},
             {"incident_id", r.incident_id},
             {"product_ids", r.product_ids},
             {"outage", r.outage},
             {"state", to_string(r.state)},
             {"reviewer", r.reviewer},
             {"review_note", r.review_note},
             {"reviewed_at", r.reviewed_at},
             {"drafted_outage", r.drafted_outage},
             {"drafted_product_ids", r.drafted_product_ids}};
}

OutageRecord record_from_json(const Json& j) {
    const auto outage = required<metrics::TimeInterval>(j, "outage");
    return OutageRecord{required<std::string>(j, "id"),
                        required<std::string>(j, "incident_id"),
                        required<std::vector<std::string>>(j, "product_ids"),
                        outage,
                        parse_record_state(required<std::string>(j, "state")),
                        j.value("reviewer", ""),
                        j.value("review_note", ""),
                        optional_field<Timestamp>(j, "reviewed_at"),
                        optional_field<metrics::TimeInterval>(j, "drafted_outage").value_or(outage),
                        j.value("drafted_product_ids", std::vector<std::string>{})};
}

void to_json(Json& j, const ReviewEdits& e) {
    j = Json::object();
    if (e.outage) j["outage"] = *e.outage;
    if (e.product_ids) j["product_ids"] = *e.product_ids;
}

void from_json(const Json& j, ReviewEdits& e) {
    e.outage = optional_field<metrics::TimeInterval>(j, "outage");
    e.product_ids = optional_field<std::vector<std::string>>(j, "product_ids");
}

}  // namespace availd::records
