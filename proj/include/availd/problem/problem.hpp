#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "availd/core/json.hpp"
#include "availd/incident/incident.hpp"

namespace availd::problem {

enum class ProblemState { Open, RcaSubmitted, Approved, Rejected };
enum class ReviewDecision { Approve, Reject };

/// The six classic Ishikawa categories.
enum class FishboneCategory { People, Process, Technology, Environment, Materials, Measurement };

std::string to_string(ProblemState s);
std::string to_string(FishboneCategory c);
ProblemState parse_problem_state(const std::string& text);
FishboneCategory parse_fishbone_category(const std::string& text);
ReviewDecision parse_rca_decision(const std::string& text);

struct TimelineEvent {
    Timestamp at;
    std::string text;
    friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

/// One step of a 5-Whys chain. Every step after the first names the index of
/// the step whose answer it questions, and that must be the previous step.
struct Why {
    std::string question;
    std::string answer;
    std::optional<std::size_t> follows;
    friend bool operator==(const Why&, const Why&) = default;
};

struct Action {
    std::string action;
    std::string owner;
    Timestamp target_date;
    friend bool operator==(const Action&, const Action&) = default;
};

struct RcaDocument {
    std::vector<TimelineEvent> timeline;
    std::map<FishboneCategory, std::vector<std::string>> fishbone;
    std::vector<Why> five_whys;
    std::string root_cause;
    std::vector<Action> corrective_actions;
    std::vector<Action> preventative_actions;
    friend bool operator==(const RcaDocument&, const RcaDocument&) = default;
};

/// Everything that keeps `doc` from being complete, e.g. "corrective_actions required".
std::vector<std::string> missing_parts(const RcaDocument& doc);

struct RcaReview {
    std::string reviewer;
    ReviewDecision decision;
    std::string note;
    Timestamp at;
    friend bool operator==(const RcaReview&, const RcaReview&) = default;
};

struct ProblemTicket {
    std::string id;
    std::string incident_id;
    std::string assignee;
    std::vector<std::string> management_chain;
    Timestamp created_at;
    Timestamp due_at;
    ProblemState state = ProblemState::Open;
    std::optional<RcaDocument> rca;
    std::optional<std::string> reviewer;
    std::optional<Timestamp> submitted_at;
    bool submitted_late = false;
    std::vector<RcaReview> reviews;
    friend bool operator==(const ProblemTicket&, const ProblemTicket&) = default;
};

/// The pre-identified resolver a significant incident's problem is routed to.
struct Resolver {
    std::string assignee;
    std::vector<std::string> management_chain;
};

inline constexpr int kDefaultRcaSlaDays = 10;

/// Opens a ticket due `rca_sla_days` calendar days after `now`, or returns
/// nullopt for an incident below the significance threshold.
std::optional<ProblemTicket> spawn_problem(std::string id, const incident::ProblemTrigger& trigger,
                                           const incident::SeverityPolicy& policy, const Resolver& resolver,
                                           Timestamp now, int rca_sla_days = kDefaultRcaSlaDays);

/// Open -> RcaSubmitted. Throws ValidationError listing missing parts.
ProblemTicket submit_rca(ProblemTicket ticket, RcaDocument rca, Timestamp now);

/// RcaSubmitted -> Approved, or back to Open on rejection with the document kept.
/// Throws IndependenceError when the reviewer is the assignee.
ProblemTicket review_rca(ProblemTicket ticket, const std::string& reviewer, ReviewDecision decision,
                         const std::string& note, Timestamp now);

struct BacklogReport {
    std::size_t open = 0;
    std::size_t awaiting_review = 0;
    std::size_t overdue = 0;
    /// Mean age over non-terminal tickets; 0 when there are none.
    double mean_age_seconds = 0.0;
};

BacklogReport rca_backlog_report(const std::vector<ProblemTicket>& tickets, Timestamp now);

/// Plain-text RCA report suitable for archiving alongside the ticket.
std::string render_rca_report(const ProblemTicket& ticket);

void to_json(Json& j, const RcaDocument& d);
void from_json(const Json& j, RcaDocument& d);
void to_json(Json& j, const ProblemTicket& t);
ProblemTicket ticket_from_json(const Json& j);
void to_json(Json& j, const BacklogReport& r);

}  // namespace availd::problem

namespace nlohmann {
template <>
struct adl_serializer<availd::problem::ProblemTicket> {
    static void to_json(json& j, const availd::problem::ProblemTicket& t) { availd::problem::to_json(j, t); }
    static availd::problem::ProblemTicket from_json(const json& j) { return availd::problem::ticket_from_json(j); }
};
}  // namespace nlohmann
