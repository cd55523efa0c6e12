#include "availd/problem/problem.hpp"

#include <array>
#include <sstream>

#include "availd/core/error.hpp"

namespace availd::problem {

namespace {

constexpr std::array<FishboneCategory, 6> kCategories{FishboneCategory::People,      FishboneCategory::Process,
                                                      FishboneCategory::Technology,  FishboneCategory::Environment,
                                                      FishboneCategory::Materials,   FishboneCategory::Measurement};

std::string rule_name(ProblemState from, const std::string& to) { return "problem:" + to_string(from) + "->" + to; }

}  // namespace

std::string to_string(ProblemState s) {
    switch (s) {
        case ProblemState::Open: return "Open";
        case ProblemState::RcaSubmitted: return "RcaSubmitted";
        case ProblemState::Approved: return "Approved";
        case ProblemState::Rejected: return "Rejected";
    }
    return "unknown";
}

std::string to_string(FishboneCategory c) {
    switch (c) {
        case FishboneCategory::People: return "People";
        case FishboneCategory::Process: return "Process";
        case FishboneCategory::Technology: return "Technology";
        case FishboneCategory::Environment: return "Environment";
        case FishboneCategory::Materials: return "Materials";
        case FishboneCategory::Measurement: return "Measurement";
    }
    return "unknown";
}

ProblemState parse_problem_state(const std::string& text) {
    for (auto s : {ProblemState::Open, ProblemState::RcaSubmitted, ProblemState::Approved, ProblemState::Rejected}) {
        if (to_string(s) == text) return s;
    }
    throw ValidationError("unknown problem state '" + text + "'");
}

FishboneCategory parse_fishbone_category(const std::string& text) {
    for (auto c : kCategories) {
        if (to_string(c) == text) return c;
    }
    throw ValidationError("unknown fishbone category '" + text +
                          "' (People, Process, Technology, Environment, Materials, Measurement)");
}

ReviewDecision parse_rca_decision(const std::string& text) {
    if (text == "approve") return ReviewDecision::Approve;
    if (text == "reject") return ReviewDecision::Reject;
    throw ValidationError("RCA decision must be 'approve' or 'reject', got '" + text + "'");
}

std::vector<std::string> missing_parts(const RcaDocument& doc) {
    std::vector<std::string> missing;
    if (doc.root_cause.empty()) missing.emplace_back("root_cause required");
    if (doc.corrective_actions.empty()) missing.emplace_back("corrective_actions required");
    if (doc.five_whys.empty()) missing.emplace_back("five_whys requires at least one step");
    for (std::size_t i = 0; i < doc.five_whys.size(); ++i) {
        const auto& why = doc.five_whys[i];
        if (why.question.empty() || why.answer.empty()) {
            missing.push_back("five_whys[" + std::to_string(i) + "] needs a question and an answer");
        }
        if (i > 0 && why.follows != i - 1) {
            missing.push_back("five_whys[" + std::to_string(i) + "] must follow five_whys[" + std::to_string(i - 1) +
                              "]");
        }
    }
    for (std::size_t i = 1; i < doc.timeline.size(); ++i) {
        if (doc.timeline[i].at < doc.timeline[i - 1].at) {
            missing.push_back("timeline[" + std::to_string(i) + "] is earlier than timeline[" +
                              std::to_string(i - 1) + "]");
        }
    }
    auto check_actions = [&missing](const std::vector<Action>& actions, const char* name) {
        for (std::size_t i = 0; i < actions.size(); ++i) {
            if (actions[i].action.empty() || actions[i].owner.empty()) {
                missing.push_back(std::string(name) + "[" + std::to_string(i) + "] needs an action and an owner");
            }
        }
    };
    check_actions(doc.corrective_actions, "corrective_actions");
    check_actions(doc.preventative_actions, "preventative_actions");
    return missing;
}

std::optional<ProblemTicket> spawn_problem(std::string id, const incident::ProblemTrigger& trigger,
                                           const incident::SeverityPolicy& policy, const Resolver& resolver,
                                           Timestamp now, int rca_sla_days) {
    if (!policy.is_significant(trigger.severity)) return std::nullopt;
    if (resolver.assignee.empty()) throw ValidationError("problem ticket needs an assignee");
    if (rca_sla_days <= 0) throw ValidationError("RCA SLA must be a positive number of days");
    ProblemTicket t;
    t.id = std::move(id);
    t.incident_id = trigger.incident_id;
    t.assignee = resolver.assignee;
    t.management_chain = resolver.management_chain;
    t.created_at = now;
    t.due_at = now + std::chrono::days{rca_sla_days};
    return t;
}

ProblemTicket submit_rca(ProblemTicket ticket, RcaDocument rca, Timestamp now) {
    if (ticket.state != ProblemState::Open) {
        throw StateMachineError(rule_name(ticket.state, "RcaSubmitted"),
                                "RCA can only be submitted on an Open ticket (state is " + to_string(ticket.state) +
                                    ")");
    }
    if (auto missing = missing_parts(rca); !missing.empty()) {
        const std::string message = "incomplete RCA document: " + missing.front();
        throw ValidationError(message, std::move(missing));
    }
    ticket.rca = std::move(rca);
    ticket.state = ProblemState::RcaSubmitted;
    ticket.submitted_at = now;
    ticket.submitted_late = now > ticket.due_at;
    return ticket;
}

ProblemTicket review_rca(ProblemTicket ticket, const std::string& reviewer, ReviewDecision decision,
                         const std::string& note, Timestamp now) {
    const std::string target = decision == ReviewDecision::Approve ? "Approved" : "Rejected";
    if (ticket.state != ProblemState::RcaSubmitted) {
        throw StateMachineError(rule_name(ticket.state, target),
                                "only a submitted RCA can be reviewed (state is " + to_string(ticket.state) + ")");
    }
    if (reviewer.empty()) throw ValidationError("RCA review requires a reviewer");
    if (reviewer == ticket.assignee) {
        throw IndependenceError("the assignee '" + reviewer + "' cannot review their own RCA");
    }
    if (decision == ReviewDecision::Reject && note.empty()) {
        throw ValidationError("rejecting an RCA requires a note");
    }
    ticket.reviewer = reviewer;
    ticket.reviews.push_back({reviewer, decision, note, now});
    // A rejected RCA goes back to the assignee with the document kept for revision.
    ticket.state = decision == ReviewDecision::Approve ? ProblemState::Approved : ProblemState::Open;
    return ticket;
}

BacklogReport rca_backlog_report(const std::vector<ProblemTicket>& tickets, Timestamp now) {
    BacklogReport r;
    double age_total = 0.0;
    std::size_t live = 0;
    for (const auto& t : tickets) {
        if (t.state != ProblemState::Open && t.state != ProblemState::RcaSubmitted) continue;
        if (t.state == ProblemState::Open) {
            ++r.open;
        } else {
            ++r.awaiting_review;
        }
        if (now > t.due_at) ++r.overdue;
        age_total += static_cast<double>((now - t.created_at).count());
        ++live;
    }
    if (live > 0) r.mean_age_seconds = age_total / static_cast<double>(live);
    return r;
}

std::string render_rca_report(const ProblemTicket& t) {
    std::ostringstream out;
    out << "RCA REPORT " << t.id << "\n";
    out << "incident: " << t.incident_id << "\n";
    out << "assignee: " << t.assignee << "\n";
    if (!t.management_chain.empty()) {
        out << "management chain:";
        for (const auto& m : t.management_chain) out << " " << m;
        out << "\n";
    }
    out << "created: " << format_rfc3339(t.created_at) << "\n";
    out << "due: " << format_rfc3339(t.due_at) << "\n";
    out << "state: " << to_string(t.state) << "\n";
    if (t.submitted_at) {
        out << "submitted: " << format_rfc3339(*t.submitted_at) << (t.submitted_late ? " (late)" : " (on time)")
            << "\n";
    }
    if (t.reviewer) out << "reviewer: " << *t.reviewer << "\n";
    if (!t.rca) {
        out << "\n(no RCA document submitted)\n";
        return out.str();
    }
    const auto& d = *t.rca;
    out << "\nTIMELINE\n";
    for (const auto& e : d.timeline) out << "  " << format_rfc3339(e.at) << "  " << e.text << "\n";
    out << "\nFISHBONE\n";
    for (const auto& [category, factors] : d.fishbone) {
        out << "  " << to_string(category) << "\n";
        for (const auto& f : factors) out << "    - " << f << "\n";
    }
    out << "\n5 WHYS\n";
    for (std::size_t i = 0; i < d.five_whys.size(); ++i) {
        out << "  " << i + 1 << ". " << d.five_whys[i].question << "\n     " << d.five_whys[i].answer << "\n";
    }
    out << "\nROOT CAUSE\n  " << d.root_cause << "\n";
    auto actions = [&out](const char* title, const std::vector<Action>& list) {
        out << "\n" << title << "\n";
        for (const auto& a : list) {
            out << "  - " << a.action << " [owner: " << a.owner << ", target: " << format_rfc3339(a.target_date)
                << "]\n";
        }
    };
    actions("CORRECTIVE ACTIONS", d.corrective_actions);
    actions("PREVENTATIVE ACTIONS", d.preventative_actions);
    if (!t.reviews.empty()) {
        out << "\nREVIEWS\n";
        for (const auto& r : t.reviews) {
            out << "  " << format_rfc3339(r.at) << " " << r.reviewer << " "
                << (r.decision == ReviewDecision::Approve ? "approved" : "rejected");
            if (!r.note.empty()) out << ": " << r.note;
            out << "\n";
        }
    }
    return out.str();
}

namespace {

Json actions_to_json(const std::vector<Action>& list) {
    Json out = Json::array();
    for (const auto& a : list) out.push_back({{"action", a.action}, {"owner", a.owner}, {"target_date", a.target_date}});
    return out;
}

std::vector<Action> actions_from_json(const Json& j, const char* key) {
    std::vector<Action> out;
    if (!j.contains(key)) return out;
    for (const auto& a : j.at(key)) {
        out.push_back({a.value("action", ""), a.value("owner", ""), required<Timestamp>(a, "target_date")});
    }
    return out;
}

}  // namespace

void to_json(Json& j, const RcaDocument& d) {
    Json timeline = Json::array();
    for (const auto& e : d.timeline) timeline.push_back({{"at", e.at}, {"text", e.text}});
    Json fishbone = Json::object();
    for (const auto& [c, factors] : d.fishbone) fishbone[to_string(c)] = factors;
    Json whys = Json::array();
    for (const auto& w : d.five_whys) {
        whys.push_back({{"question", w.question}, {"answer", w.answer}, {"follows", w.follows}});
    }
    j = Json{{"timeline", timeline},
             {"fishbone", fishbone},
             {"five_whys", whys},
             {"root_cause", d.root_cause},
             {"corrective_actions", actions_to_json(d.corrective_actions)},
             {"preventative_actions", actions_to_json(d.preventative_actions)}};
}

void from_json(const Json& j, RcaDocument& d) {
    if (!j.is_object()) throw ValidationError("RCA document must be an object");
    d = RcaDocument{};
    for (const auto& e : j.value("timeline", Json::array())) {
        d.timeline.push_back({required<Timestamp>(e, "at"), e.value("text", "")});
    }
    const Json fishbone = j.value("fishbone", Json::object());
    for (const auto& [key, factors] : fishbone.items()) {
        d.fishbone[parse_fishbone_category(key)] = factors.get<std::vector<std::string>>();
    }
    for (const auto& w : j.value("five_whys", Json::array())) {
        d.five_whys.push_back(
            {w.value("question", ""), w.value("answer", ""), optional_field<std::size_t>(w, "follows")});
    }
    d.root_cause = j.value("root_cause", "");
    d.corrective_actions = actions_from_json(j, "corrective_actions");
    d.preventative_actions = actions_from_json(j, "preventative_actions");
}

void to_json(Json& j, const ProblemTicket& t) {
    Json reviews = Json::array();
    for (const auto& r : t.reviews) {
        reviews.push_back({{"reviewer", r.reviewer},
                           {"decision", r.decision == ReviewDecision::Approve ? "approve" : "reject"},
                           {"note", r.note},
                           {"at", r.at}});
    }
    j = Json{{"id", t.id},
             {"incident_id", t.incident_id},
             {"assignee", t.assignee},
             {"management_chain", t.management_chain},
             {"created_at", t.created_at},
             {"due_at", t.due_at},
             {"state", to_string(t.state)},
             {"rca", t.rca ? Json(*t.rca) : Json(nullptr)},
             {"reviewer", t.reviewer},
             {"submitted_at", t.submitted_at},
             {"submitted_late", t.submitted_late},
             {"reviews", reviews}};
}

ProblemTicket ticket_from_json(const Json& j) {
    ProblemTicket t;
    t.id = required<std::string>(j, "id");
    t.incident_id = required<std::string>(j, "incident_id");
    t.assignee = required<std::string>(j, "assignee");
    t.management_chain = j.value("management_chain", std::vector<std::string>{});
    t.created_at = required<Timestamp>(j, "created_at");
    t.due_at = required<Timestamp>(j, "due_at");
    t.state = parse_problem_state(required<std::string>(j, "state"));
    t.rca = optional_field<RcaDocument>(j, "rca");
    t.reviewer = optional_field<std::string>(j, "reviewer");
    t.submitted_at = optional_field<Timestamp>(j, "submitted_at");
    t.submitted_late = j.value("submitted_late", false);
    for (const auto& r : j.value("reviews", Json::array())) {
        t.reviews.push_back({required<std::string>(r, "reviewer"), parse_rca_decision(required<std::string>(r, "decision")),
                             r.value("note", ""), required<Timestamp>(r, "at")});
    }
    return t;
}

void to_json(Json& j, const BacklogReport& r) {
    j = Json{{"open", r.open},
             {"awaiting_review", r.awaiting_review},
             {"overdue", r.overdue},
             {"mean_age_seconds", r.mean_age_seconds}};
}

}  // namespace availd::problem
