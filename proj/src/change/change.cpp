#include "availd/change/change.hpp"

#include <algorithm>
#include <set>

#include "availd/core/error.hpp"

namespace availd::change {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& text, const std::array<Enum, N>& values, const char* what) {
    for (auto v : values) {
        if (to_string(v) == text) return v;
    }
    throw ValidationError(std::string("unknown ") + what + " '" + text + "'");
}

constexpr std::array<ChecklistStatus, 4> kChecklistStatuses{ChecklistStatus::Pending, ChecklistStatus::Passed,
                                                            ChecklistStatus::Failed, ChecklistStatus::Waived};
constexpr std::array<ChangeCategory, 4> kCategories{ChangeCategory::Software, ChangeCategory::Hardware,
                                                    ChangeCategory::Data, ChangeCategory::Configuration};
constexpr std::array<ChangeLayer, 2> kLayers{ChangeLayer::Vendor, ChangeLayer::InHouse};

[[noreturn]] void illegal_release(const Release& r, ReleaseState to) {
    throw StateMachineError("release:" + to_string(r.state) + "->" + to_string(to),
                            "release " + r.id + " cannot move from " + to_string(r.state) + " to " + to_string(to));
}

[[noreturn]] void illegal_change(const ChangeRequest& c, ChangeState to) {
    throw StateMachineError("change:" + to_string(c.state) + "->" + to_string(to),
                            "change " + c.id + " cannot move from " + to_string(c.state) + " to " + to_string(to));
}

void move_release(Release& r, ReleaseState to, const std::string& actor, Timestamp now) {
    r.history.push_back({to_string(r.state), to_string(to), actor, now});
    r.state = to;
}

void move_change(ChangeRequest& c, ChangeState to, const std::string& actor, Timestamp now) {
    c.history.push_back({to_string(c.state), to_string(to), actor, now});
    c.state = to;
}

bool item_clears(const ChecklistItem& item) {
    return item.status == ChecklistStatus::Passed ||
           (item.status == ChecklistStatus::Waived && !item.waiver_note.empty());
}

}  // namespace

std::string to_string(ReleaseState s) {
    switch (s) {
        case ReleaseState::Planned: return "Planned";
        case ReleaseState::PrrPassed: return "PrrPassed";
        case ReleaseState::Approved: return "Approved";
        case ReleaseState::Deployed: return "Deployed";
        case ReleaseState::Cancelled: return "Cancelled";
    }
    return "unknown";
}

std::string to_string(ChecklistStatus s) {
    switch (s) {
        case ChecklistStatus::Pending: return "Pending";
        case ChecklistStatus::Passed: return "Passed";
        case ChecklistStatus::Failed: return "Failed";
        case ChecklistStatus::Waived: return "Waived";
    }
    return "unknown";
}

std::string to_string(ChangeCategory c) {
    switch (c) {
        case ChangeCategory::Software: return "software";
        case ChangeCategory::Hardware: return "hardware";
        case ChangeCategory::Data: return "data";
        case ChangeCategory::Configuration: return "configuration";
    }
    return "unknown";
}

std::string to_string(ChangeLayer l) { return l == ChangeLayer::Vendor ? "vendor" : "in-house"; }

std::string to_string(ChangeState s) {
    switch (s) {
        case ChangeState::Requested: return "Requested";
        case ChangeState::Approved: return "Approved";
        case ChangeState::Rejected: return "Rejected";
        case ChangeState::Executed: return "Executed";
        case ChangeState::Verified: return "Verified";
    }
    return "unknown";
}

ReleaseState parse_release_state(const std::string& text) { return parse_enum(text, kAllReleaseStates, "release state"); }
ChecklistStatus parse_checklist_status(const std::string& text) {
    return parse_enum(text, kChecklistStatuses, "checklist status");
}
ChangeCategory parse_change_category(const std::string& text) { return parse_enum(text, kCategories, "change category"); }
ChangeLayer parse_change_layer(const std::string& text) { return parse_enum(text, kLayers, "change layer"); }
ChangeState parse_change_state(const std::string& text) { return parse_enum(text, kAllChangeStates, "change state"); }

ChangeDecision parse_change_decision(const std::string& text) {
    if (text == "approve") return ChangeDecision::Approve;
    if (text == "reject") return ChangeDecision::Reject;
    throw ValidationError("change decision must be 'approve' or 'reject', got '" + text + "'");
}

void check_release_window(const ReleaseCalendar& calendar, const metrics::TimeInterval& window) {
    for (const auto& freeze : calendar.freeze_windows) {
        if (freeze.overlaps(window)) {
            throw SchedulingError("target window [" + format_rfc3339(window.start()) + ", " +
                                  format_rfc3339(window.end()) + ") overlaps freeze [" +
                                  format_rfc3339(freeze.start()) + ", " + format_rfc3339(freeze.end()) + ")");
        }
    }
    if (calendar.release_windows.empty()) return;
    const bool inside = std::any_of(calendar.release_windows.begin(), calendar.release_windows.end(),
                                    [&](const metrics::TimeInterval& w) {
                                        return w.start() <= window.start() && window.end() <= w.end();
                                    });
    if (!inside) {
        throw SchedulingError("target window [" + format_rfc3339(window.start()) + ", " +
                              format_rfc3339(window.end()) + ") is not inside a configured release window");
    }
}

Release create_release(std::string id, std::string name, std::vector<std::string> pbi_ids,
                       metrics::TimeInterval target_window, std::vector<ChecklistItem> prr, const std::string& actor,
                       Timestamp now) {
    if (name.empty()) throw ValidationError("release name must not be empty");
    std::set<std::string> keys;
    for (auto& item : prr) {
        if (item.key.empty()) throw ValidationError("checklist items need a key");
        if (!keys.insert(item.key).second) throw ValidationError("duplicate checklist key '" + item.key + "'");
    }
    Release r{std::move(id), std::move(name), std::move(pbi_ids), target_window, std::move(prr),
              ReleaseState::Planned, {}, {}};
    r.history.push_back({"", to_string(ReleaseState::Planned), actor, now});
    return r;
}

Release run_prr(Release release, const std::map<std::string, ItemUpdate>& updates, const std::string& actor,
                Timestamp now) {
    if (release.state != ReleaseState::Planned) illegal_release(release, ReleaseState::PrrPassed);
    std::vector<std::string> unknown;
    for (const auto& [key, update] : updates) {
        const bool found = std::any_of(release.prr.begin(), release.prr.end(),
                                       [&](const ChecklistItem& i) { return i.key == key; });
        if (!found) unknown.push_back(key);
        if (update.status == ChecklistStatus::Waived && update.waiver_note.empty()) {
            throw ValidationError("waiving checklist item '" + key + "' requires a note");
        }
    }
    if (!unknown.empty()) throw ValidationError("unknown checklist key", std::move(unknown));

    for (auto& item : release.prr) {
        if (auto it = updates.find(item.key); it != updates.end()) {
            item.status = it->second.status;
            item.waiver_note = it->second.status == ChecklistStatus::Waived ? it->second.waiver_note : "";
        }
    }
    release.failing_items.clear();
    for (const auto& item : release.prr) {
        if (item.mandatory && !item_clears(item)) release.failing_items.push_back(item.key);
    }
    if (release.failing_items.empty()) move_release(release, ReleaseState::PrrPassed, actor, now);
    return release;
}

ApprovalOutcome approve_release(Release release, std::vector<ChangeRequest> attached, const std::string& board_actor,
                                const ReleaseCalendar& calendar, Timestamp now) {
    if (release.state != ReleaseState::PrrPassed) illegal_release(release, ReleaseState::Approved);
    check_release_window(calendar, release.target_window);
    for (auto& c : attached) {
        if (c.release_id != release.id) {
            throw ValidationError("change " + c.id + " is not attached to release " + release.id);
        }
        if (c.state == ChangeState::Requested) move_change(c, ChangeState::Approved, board_actor, now);
    }
    move_release(release, ReleaseState::Approved, board_actor, now);
    return {std::move(release), std::move(attached)};
}

Release deploy_release(Release release, const std::string& actor, Timestamp now) {
    if (release.state != ReleaseState::Approved) illegal_release(release, ReleaseState::Deployed);
    move_release(release, ReleaseState::Deployed, actor, now);
    return release;
}

Release cancel_release(Release release, const std::string& actor, Timestamp now) {
    if (release.state == ReleaseState::Deployed || release.state == ReleaseState::Cancelled) {
        illegal_release(release, ReleaseState::Cancelled);
    }
    move_release(release, ReleaseState::Cancelled, actor, now);
    return release;
}

ChangeRequest request_change(std::string id, ChangeRequest draft, Timestamp now) {
    if (draft.description.empty()) throw ValidationError("change description must not be empty");
    draft.id = std::move(id);
    draft.state = ChangeState::Requested;
    draft.requested_at = now;
    draft.executed_at.reset();
    draft.history.clear();
    draft.history.push_back({"", to_string(ChangeState::Requested), "", now});
    return draft;
}

ChangeRequest review_change(ChangeRequest change, ChangeDecision decision, const std::string& actor, Timestamp now) {
    const ChangeState to = decision == ChangeDecision::Approve ? ChangeState::Approved : ChangeState::Rejected;
    if (change.state != ChangeState::Requested) illegal_change(change, to);
    move_change(change, to, actor, now);
    return change;
}

ChangeRequest execute_change(ChangeRequest change, const std::string& actor, Timestamp now) {
    if (change.state == ChangeState::Requested || change.state == ChangeState::Rejected) {
        throw AuthorizationOrderError("change " + change.id + " is " + to_string(change.state) +
                                      "; only formally approved changes may be executed");
    }
    if (change.state != ChangeState::Approved) illegal_change(change, ChangeState::Executed);
    if (actor.empty()) throw ValidationError("executing a change requires an actor");
    move_change(change, ChangeState::Executed, actor, now);
    change.executed_at = now;
    return change;
}

ChangeRequest verify_change(ChangeRequest change, const std::string& actor, Timestamp now) {
    if (change.state != ChangeState::Executed) illegal_change(change, ChangeState::Verified);
    move_change(change, ChangeState::Verified, actor, now);
    return change;
}

std::vector<ChangeRequest> daily_review_queue(const std::vector<ChangeRequest>& changes, Timestamp day) {
    const Timestamp cutoff = start_of_day(day) + std::chrono::days{1};
    std::vector<ChangeRequest> queue;
    for (const auto& c : changes) {
        if (c.state == ChangeState::Requested && c.requested_at < cutoff) queue.push_back(c);
    }
    std::stable_sort(queue.begin(), queue.end(), [](const ChangeRequest& a, const ChangeRequest& b) {
        if (a.emergency != b.emergency) return a.emergency;
        if (a.requested_at != b.requested_at) return a.requested_at < b.requested_at;
        return a.id < b.id;
    });
    return queue;
}

std::vector<Correlation> change_incident_correlation(const std::vector<ChangeRequest>& changes,
                                                     const std::vector<incident::Incident>& incidents,
                                                     Seconds window) {
    if (window.count() <= 0) throw ValidationError("correlation window must be positive");
    std::vector<Correlation> pairs;
    for (const auto& c : changes) {
        if (!c.executed_at) continue;
        for (const auto& inc : incidents) {
            if (!inc.lifecycle.occurred_at) continue;
            const Timestamp occurred = *inc.lifecycle.occurred_at;
            if (occurred < *c.executed_at || occurred > *c.executed_at + window) continue;
            const bool shared = std::any_of(c.product_ids.begin(), c.product_ids.end(), [&](const std::string& p) {
                return std::find(inc.product_ids.begin(), inc.product_ids.end(), p) != inc.product_ids.end();
            });
            if (shared) pairs.push_back({c.id, inc.id});
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

Json export_release_calendar(const std::vector<Release>& releases) {
    std::vector<const Release*> ordered;
    for (const auto& r : releases) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](const Release* a, const Release* b) {
        if (a->target_window.start() != b->target_window.start()) {
            return a->target_window.start() < b->target_window.start();
        }
        return a->id < b->id;
    });
    Json entries = Json::array();
    for (const auto* r : ordered) {
        entries.push_back({{"id", r->id},
                           {"name", r->name},
                           {"state", to_string(r->state)},
                           {"window", r->target_window},
                           {"pbi_ids", r->pbi_ids}});
    }
    return Json{{"releases", entries}};
}

namespace {

Json history_to_json(const std::vector<StateChange>& history) {
    Json out = Json::array();
    for (const auto& h : history) out.push_back({{"from", h.from}, {"to", h.to}, {"actor", h.actor}, {"at", h.at}});
    return out;
}

std::vector<StateChange> history_from_json(const Json& j) {
    std::vector<StateChange> out;
    for (const auto& h : j) {
        out.push_back({h.value("from", ""), h.value("to", ""), h.value("actor", ""), required<Timestamp>(h, "at")});
    }
    return out;
}

}  // namespace

void to_json(Json& j, const ChecklistItem& i) {
    j = Json{{"key", i.key},
             {"description", i.description},
             {"mandatory", i.mandatory},
             {"status", to_string(i.status)},
             {"waiver_note", i.waiver_note}};
}

void from_json(const Json& j, ChecklistItem& i) {
    i.key = required<std::string>(j, "key");
    i.description = j.value("description", "");
    i.mandatory = j.value("mandatory", true);
    i.status = parse_checklist_status(j.value("status", "Pending"));
    i.waiver_note = j.value("waiver_note", "");
}

void to_json(Json& j, const Release& r) {
    j = Json{{"id", r.id},
             {"name", r.name},
             {"pbi_ids", r.pbi_ids},
             {"target_window", r.target_window},
             {"prr", r.prr},
             {"state", to_string(r.state)},
             {"failing_items", r.failing_items},
             {"history", history_to_json(r.history)}};
}

Release release_from_json(const Json& j) {
    return Release{required<std::string>(j, "id"),
                   required<std::string>(j, "name"),
                   j.value("pbi_ids", std::vector<std::string>{}),
                   required<metrics::TimeInterval>(j, "target_window"),
                   j.value("prr", std::vector<ChecklistItem>{}),
                   parse_release_state(j.value("state", "Planned")),
                   j.value("failing_items", std::vector<std::string>{}),
                   history_from_json(j.value("history", Json::array()))};
}

void to_json(Json& j, const ChangeRequest& c) {
    j = Json{{"id", c.id},
             {"release_id", c.release_id},
             {"description", c.description},
             {"category", to_string(c.category)},
             {"layer", to_string(c.layer)},
             {"emergency", c.emergency},
             {"product_ids", c.product_ids},
             {"state", to_string(c.state)},
             {"requested_at", c.requested_at},
             {"executed_at", c.executed_at},
             {"history", history_to_json(c.history)}};
}

void from_json(const Json& j, ChangeRequest& c) {
    c.id = j.value("id", "");
    c.release_id = optional_field<std::string>(j, "release_id");
    c.description = j.value("description", "");
    c.category = parse_change_category(j.value("category", "software"));
    c.layer = parse_change_layer(j.value("layer", "in-house"));
    c.emergency = j.value("emergency", false);
    c.product_ids = j.value("product_ids", std::vector<std::string>{});
    c.state = parse_change_state(j.value("state", "Requested"));
    c.requested_at = optional_field<Timestamp>(j, "requested_at").value_or(Timestamp{});
    c.executed_at = optional_field<Timestamp>(j, "executed_at");
    c.history = history_from_json(j.value("history", Json::array()));
}

}  // namespace availd::change
