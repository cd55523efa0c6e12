#pragma once

// Release calendar, production readiness review, Migration Review Board
// approval and the change-request repository.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "availd/core/json.hpp"
#include "availd/core/metrics.hpp"
#include "availd/incident/incident.hpp"

namespace availd::change {

enum class ReleaseState { Planned, PrrPassed, Approved, Deployed, Cancelled };
enum class ChecklistStatus { Pending, Passed, Failed, Waived };
enum class ChangeCategory { Software, Hardware, Data, Configuration };
/// Hosting-vendor layer versus the in-house operations layer.
enum class ChangeLayer { Vendor, InHouse };
enum class ChangeState { Requested, Approved, Rejected, Executed, Verified };
enum class ChangeDecision { Approve, Reject };

std::string to_string(ReleaseState s);
std::string to_string(ChecklistStatus s);
std::string to_string(ChangeCategory c);
std::string to_string(ChangeLayer l);
std::string to_string(ChangeState s);
ReleaseState parse_release_state(const std::string& text);
ChecklistStatus parse_checklist_status(const std::string& text);
ChangeCategory parse_change_category(const std::string& text);
ChangeLayer parse_change_layer(const std::string& text);
ChangeState parse_change_state(const std::string& text);
ChangeDecision parse_change_decision(const std::string& text);

inline constexpr std::array<ReleaseState, 5> kAllReleaseStates{ReleaseState::Planned, ReleaseState::PrrPassed,
                                                               ReleaseState::Approved, ReleaseState::Deployed,
                                                               ReleaseState::Cancelled};
inline constexpr std::array<ChangeState, 5> kAllChangeStates{ChangeState::Requested, ChangeState::Approved,
                                                             ChangeState::Rejected, ChangeState::Executed,
                                                             ChangeState::Verified};

struct ChecklistItem {
    std::string key;
    std::string description;
    bool mandatory = true;
    ChecklistStatus status = ChecklistStatus::Pending;
    std::string waiver_note;
    friend bool operator==(const ChecklistItem&, const ChecklistItem&) = default;
};

/// A recorded state change with the actor who made it.
struct StateChange {
    std::string from;
    std::string to;
    std::string actor;
    Timestamp at;
    friend bool operator==(const StateChange&, const StateChange&) = default;
};

struct Release {
    std::string id;
    std::string name;
    std::vector<std::string> pbi_ids;
    metrics::TimeInterval target_window;
    std::vector<ChecklistItem> prr;
    ReleaseState state = ReleaseState::Planned;
    std::vector<std::string> failing_items;
    std::vector<StateChange> history;
    friend bool operator==(const Release&, const Release&) = default;
};

struct ChangeRequest {
    std::string id;
    std::optional<std::string> release_id;
    std::string description;
    ChangeCategory category = ChangeCategory::Software;
    ChangeLayer layer = ChangeLayer::InHouse;
    /// Emergency changes jump the review queue; they still need approval.
    bool emergency = false;
    std::vector<std::string> product_ids;
    ChangeState state = ChangeState::Requested;
    Timestamp requested_at;
    std::optional<Timestamp> executed_at;
    std::vector<StateChange> history;
    friend bool operator==(const ChangeRequest&, const ChangeRequest&) = default;
};

/// Windows releases may target, and freezes they may not touch. An empty
/// `release_windows` list leaves the calendar open outside freezes.
struct ReleaseCalendar {
    std::vector<metrics::TimeInterval> release_windows;
    std::vector<metrics::TimeInterval> freeze_windows;
};

/// Throws SchedulingError if `window` overlaps a freeze or lies outside every release window.
void check_release_window(const ReleaseCalendar& calendar, const metrics::TimeInterval& window);

Release create_release(std::string id, std::string name, std::vector<std::string> pbi_ids,
                       metrics::TimeInterval target_window, std::vector<ChecklistItem> prr, const std::string& actor,
                       Timestamp now);

struct ItemUpdate {
    ChecklistStatus status;
    std::string waiver_note;
};

/// Applies checklist statuses; PrrPassed iff every mandatory item is Passed or
/// Waived with a note, otherwise stays Planned with `failing_items` listed.
Release run_prr(Release release, const std::map<std::string, ItemUpdate>& updates, const std::string& actor,
                Timestamp now);

struct ApprovalOutcome {
    Release release;
    /// The attached change requests after cascading Requested -> Approved.
    std::vector<ChangeRequest> changes;
};

ApprovalOutcome approve_release(Release release, std::vector<ChangeRequest> attached, const std::string& board_actor,
                                const ReleaseCalendar& calendar, Timestamp now);
Release deploy_release(Release release, const std::string& actor, Timestamp now);
Release cancel_release(Release release, const std::string& actor, Timestamp now);

ChangeRequest request_change(std::string id, ChangeRequest draft, Timestamp now);
/// Daily MRB review: Requested -> Approved | Rejected.
ChangeRequest review_change(ChangeRequest change, ChangeDecision decision, const std::string& actor, Timestamp now);
/// Approved -> Executed. Throws AuthorizationOrderError for unapproved changes.
ChangeRequest execute_change(ChangeRequest change, const std::string& actor, Timestamp now);
ChangeRequest verify_change(ChangeRequest change, const std::string& actor, Timestamp now);

/// Requested changes raised on or before `day` (UTC), emergencies first, then by requested_at.
std::vector<ChangeRequest> daily_review_queue(const std::vector<ChangeRequest>& changes, Timestamp day);

inline constexpr Seconds kDefaultCorrelationWindow{72 * 3600};

struct Correlation {
    std::string change_id;
    std::string incident_id;
    friend bool operator==(const Correlation&, const Correlation&) = default;
    friend auto operator<=>(const Correlation&, const Correlation&) = default;
};

/// Executed changes followed within `window` by an incident on a shared
/// product. Sorted, so independent of input order.
std::vector<Correlation> change_incident_correlation(const std::vector<ChangeRequest>& changes,
                                                     const std::vector<incident::Incident>& incidents,
                                                     Seconds window);

/// Release schedule as a structured document, ordered by window start.
Json export_release_calendar(const std::vector<Release>& releases);

void to_json(Json& j, const ChecklistItem& i);
void from_json(const Json& j, ChecklistItem& i);
void to_json(Json& j, const Release& r);
Release release_from_json(const Json& j);
void to_json(Json& j, const ChangeRequest& c);
void from_json(const Json& j, ChangeRequest& c);

}  // namespace availd::change

namespace nlohmann {
template <>
struct adl_serializer<availd::change::Release> {
    static void to_json(json& j, const availd::change::Release& r) { availd::change::to_json(j, r); }
    static availd::change::Release from_json(const json& j) { return availd::change::release_from_json(j); }
};
}  // namespace nlohmann
