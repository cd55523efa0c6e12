#pragma once

// Randomized operation sequences against an Engine, with redelivery of
// alerts and workflow outputs mixed in.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "availd/store/engine.hpp"
#include "support/fixtures.hpp"

namespace availd::testing {

struct WorkloadOutcome {
    /// Incidents that were closed at least once as significant outages.
    std::set<std::string> owed_record;
    /// Incidents closed at least once at significant severity.
    std::set<std::string> owed_problem;
    std::size_t operations = 0;
    std::size_t rejected = 0;
};

inline WorkloadOutcome run_workload(store::Engine& engine, ManualClock& clock, std::mt19937_64& rng,
                                    std::size_t steps) {
    using incident::Severity;
    using incident::State;
    WorkloadOutcome out;
    std::vector<alerts::AlertEvent> sent;
    std::vector<incident::OutageRecordDraft> drafts;
    std::vector<incident::ProblemTrigger> triggers;
    const std::vector<std::string> products{"P1", "P2", "P3"};
    const std::vector<std::string> monitors{"probe-p1", "cpu-p2", "ghost"};
    const std::vector<std::string> actors{"alice", "bob", "dana", "erin"};

    auto pick = [&rng](const auto& v) -> const auto& { return v[rng() % v.size()]; };
    auto random_incident = [&]() -> std::optional<incident::Incident> {
        const auto all = engine.read([](const store::State& s) { return s.incident_list(); });
        if (all.empty()) return std::nullopt;
        return all[rng() % all.size()];
    };

    for (std::size_t step = 0; step < steps; ++step) {
        clock.advance(Seconds{static_cast<std::int64_t>(rng() % 3600)});
        ++out.operations;
        try {
            switch (rng() % 11) {
                case 0: {
                    incident::IncidentDetails d;
                    d.product_ids = {pick(products)};
                    if (rng() % 4 == 0) d.product_ids.push_back(pick(products));
                    d.severity = Severity(rng() % 4);
                    d.causes_outage = rng() % 2 == 0;
                    d.title = "manual incident";
                    d.actor = pick(actors);
                    d.occurred_at = clock.now() - Seconds{static_cast<std::int64_t>(rng() % 1800)};
                    engine.open_incident(d);
                    break;
                }
                case 1:
                case 2: {
                    alerts::AlertEvent e;
                    if (!sent.empty() && rng() % 3 == 0) {
                        e = pick(sent);  // redelivery
                    } else {
                        e.monitor_id = pick(monitors);
                        e.fired_at = clock.now() - Seconds{static_cast<std::int64_t>(rng() % 600)};
                        e.value = e.monitor_id == "cpu-p2" ? static_cast<double>(rng() % 100) : double(rng() % 2);
                        e.message = "generated";
                        sent.push_back(e);
                    }
                    engine.ingest_alert(e);
                    break;
                }
                case 3:
                case 4: {
                    const auto inc = random_incident();
                    if (!inc) break;
                    const State to = incident::kAllStates[rng() % incident::kAllStates.size()];
                    incident::TransitionFields f;
                    if (to == State::Resolved && rng() % 5 != 0) {
                        const auto occurred = *inc->lifecycle.occurred_at;
                        const auto detected = *inc->lifecycle.detected_at;
                        const auto span = std::max(clock.now() - detected, Seconds{1});
                        f = resolve_fields(occurred, (detected - occurred) +
                                                         Seconds{static_cast<std::int64_t>(rng() % span.count()) + 1});
                    }
                    if (rng() % 6 == 0) f.severity = Severity(rng() % 4);
                    if (rng() % 8 == 0) f.causes_outage = rng() % 2 == 0;
                    engine.transition_incident(inc->id, to, f, pick(actors));
                    break;
                }
                case 5: {
                    const auto inc = random_incident();
                    if (!inc) break;
                    const auto r = engine.close_incident(inc->id, pick(actors));
                    const bool significant = engine.read([&](const store::State& s) {
                        return s.config().policy.is_significant(r.incident.severity);
                    });
                    if (significant) out.owed_problem.insert(inc->id);
                    if (significant && r.incident.causes_outage) out.owed_record.insert(inc->id);
                    if (r.record) {
                        drafts.push_back({inc->id, r.record->drafted_product_ids, r.record->drafted_outage});
                    }
                    if (r.problem) triggers.push_back({inc->id, r.incident.severity, r.incident.product_ids, clock.now()});
                    break;
                }
                case 6: {
                    if (!drafts.empty()) engine.deliver_outage_draft(pick(drafts));
                    if (!triggers.empty()) engine.deliver_problem_trigger(pick(triggers));
                    break;
                }
                case 7: {
                    const auto ids = engine.read([](const store::State& s) {
                        std::vector<std::string> v;
                        for (const auto& [id, _] : s.records()) v.push_back(id);
                        return v;
                    });
                    if (ids.empty()) break;
                    const bool confirm = rng() % 3 != 0;
                    engine.review_outage(pick(ids),
                                         confirm ? records::ReviewDecision::Confirm : records::ReviewDecision::Reject,
                                         {}, pick(actors), confirm ? "" : "false positive");
                    break;
                }
                case 8: {
                    const auto tickets = engine.read([](const store::State& s) { return store::State::values(s.problems()); });
                    if (tickets.empty()) break;
                    const auto& t = pick(tickets);
                    if (rng() % 2 == 0) {
                        problem::RcaDocument doc;
                        doc.five_whys = {{"why?", "because", std::nullopt}};
                        doc.root_cause = "cause";
                        doc.corrective_actions = {{"fix", t.assignee, clock.now()}};
                        engine.submit_rca(t.id, doc);
                    } else {
                        engine.review_rca(t.id, pick(actors),
                                          rng() % 2 ? problem::ReviewDecision::Approve : problem::ReviewDecision::Reject,
                                          "reviewed");
                    }
                    break;
                }
                case 9: {
                    const auto releases =
                        engine.read([](const store::State& s) { return store::State::values(s.releases()); });
                    if (releases.empty() || rng() % 3 == 0) {
                        const auto start = clock.now() + Seconds{86400};
                        engine.create_release("r", {"PBI-1"}, metrics::TimeInterval{start, start + Seconds{3600}},
                                              {{"storage", "storage", true, change::ChecklistStatus::Pending, ""}},
                                              pick(actors));
                        break;
                    }
                    const auto& r = pick(releases);
                    switch (rng() % 4) {
                        case 0: engine.run_prr(r.id, Json{{"storage", rng() % 2 ? "Passed" : "Failed"}}, "qa"); break;
                        case 1: engine.approve_release(r.id, "mrb"); break;
                        case 2: engine.deploy_release(r.id, "ops"); break;
                        default: engine.cancel_release(r.id, "pm"); break;
                    }
                    break;
                }
                default: {
                    const auto changes =
                        engine.read([](const store::State& s) { return store::State::values(s.changes()); });
                    if (changes.empty() || rng() % 3 == 0) {
                        change::ChangeRequest c;
                        c.description = "change";
                        c.product_ids = {pick(products)};
                        c.emergency = rng() % 5 == 0;
                        engine.request_change(c);
                        break;
                    }
                    const auto& c = pick(changes);
                    switch (rng() % 4) {
                        case 0: engine.review_change(c.id, change::ChangeDecision::Approve, "mrb"); break;
                        case 1: engine.review_change(c.id, change::ChangeDecision::Reject, "mrb"); break;
                        case 2: engine.execute_change(c.id, "dba"); break;
                        default: engine.verify_change(c.id, "qa"); break;
                    }
                    break;
                }
            }
        } catch (const Error&) {
            ++out.rejected;
        }
    }
    return out;
}

}  // namespace availd::testing
