// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "availd/change/change.hpp"
#include "availd/core/metrics.hpp"
#include "availd/incident/incident.hpp"
#include "availd/problem/problem.hpp"
#include "availd/service/api.hpp"
#include "support/fixtures.hpp"
#include "support/http.hpp"
#include "support/oracles.hpp"
#include "support/service_fixtures.hpp"
#include "support/workload.hpp"

using namespace availd;
using availd::testing::ManualClock;

namespace {

Timestamp at(const char* text) { return parse_rfc3339(text); }
constexpr Seconds kDay{86400};

// Collects the first few failures of a criterion.
class Failures {
public:
    void add(std::string what) {
        if (messages_.size() < 5) messages_.push_back(std::move(what));
        ++count_;
    }
    template <class... A>
    void addf(const char* fmt, A... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        add(buf);
    }
    bool ok() const { return count_ == 0; }
    std::string summary() const {
        std::string s;
        for (const auto& m : messages_) s += (s.empty() ? "" : "; ") + m;
        if (count_ > messages_.size()) s += "; +" + std::to_string(count_ - messages_.size()) + " more";
        return s;
    }

private:
    std::vector<std::string> messages_;
    std::size_t count_ = 0;
};

double relative_error(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

// ---------------------------------------------------------------------------

void nines_ladder_check(Failures& f) {
    struct Row {
        double percent;
        double per_year_seconds;
        double per_week_seconds;
    };
    const Row table[] = {{99.0, 3.65 * 86400, 1.68 * 3600},
                         {99.9, 8.76 * 3600, 10.1 * 60},
                         {99.99, 52.56 * 60, 1.01 * 60},
                         {99.999, 5.26 * 60, 6.05}};
    const auto ladder = metrics::nines_ladder();
    if (ladder.size() != 4) {
        f.addf("ladder has %zu tiers", ladder.size());
        return;
    }
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& tier = ladder[i];
        const auto& want = table[i];
        if (tier.percent != want.percent) f.addf("tier %zu percent %g", i, tier.percent);
        const double y = tier.downtime_per_year.count();
        const double w = tier.downtime_per_week.count();
        if (relative_error(y, want.per_year_seconds) > 0.005) {
            f.addf("%g%% per year %.2f s, expected %.2f s", want.percent, y, want.per_year_seconds);
        }
        if (relative_error(w, want.per_week_seconds) > 0.005) {
            f.addf("%g%% per week %.2f s, expected %.2f s", want.percent, w, want.per_week_seconds);
        }
    }
}

void availability_oracle_check(Failures& f) {
    std::mt19937_64 rng(20250310);
    for (int i = 0; i < 1000; ++i) {
        const auto c = testing::random_availability_case(rng);
        const auto want = testing::minute_grid_oracle(c.schedule, c.period, c.outages);
        const auto planned = metrics::expand_schedule(c.schedule, c.period);
        const auto got = metrics::compute_availability(planned, c.outages);
        if (got.planned.count() != want.planned_minutes * 60 || got.downtime.count() != want.down_minutes * 60) {
            f.addf("case %d: planned %lld/%lld s, down %lld/%lld s", i, static_cast<long long>(got.planned.count()),
                   static_cast<long long>(want.planned_minutes * 60), static_cast<long long>(got.downtime.count()),
                   static_cast<long long>(want.down_minutes * 60));
        }
    }
}

void lifecycle_identity_check(Failures& f) {
    std::mt19937_64 rng(1700);
    for (int h = 0; h < 500; ++h) {
        const auto history = testing::random_history(rng, static_cast<std::size_t>(rng() % 40));
        const auto n = history.size();

        long double repair_all = 0, repair_head = 0, gaps = 0, between = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto repair = (history[i].restored_at - history[i].occurred_at).count();
            repair_all += repair;
            if (i + 1 == n) continue;
            repair_head += repair;
            const auto gap = (history[i + 1].occurred_at - history[i].restored_at).count();
            const auto pair = (history[i + 1].occurred_at - history[i].occurred_at).count();
            if (pair != repair + gap) f.addf("history %d pair %zu: %lld != %lld + %lld", h, i, (long long)pair,
                                             (long long)repair, (long long)gap);
            gaps += gap;
            between += pair;
        }

        const auto m = metrics::lifecycle_metrics(history);
        if (n == 0) {
            if (m.mttr_seconds || m.mttf_seconds || m.mtbf_seconds) f.addf("history %d: empty history has metrics", h);
            continue;
        }
        if (!m.mttr_seconds || relative_error(*m.mttr_seconds, double(repair_all / n)) > 1e-9) {
            f.addf("history %d: MTTR mismatch", h);
        }
        if (n < 2) {
            if (m.mttf_seconds || m.mtbf_seconds) f.addf("history %d: single span has MTTF/MTBF", h);
            continue;
        }
        const long double pairs = n - 1;
        if (!m.mttf_seconds || !m.mtbf_seconds) {
            f.addf("history %d: MTTF/MTBF absent", h);
            continue;
        }
        if (relative_error(*m.mttf_seconds, double(gaps / pairs)) > 1e-9) f.addf("history %d: MTTF mismatch", h);
        if (relative_error(*m.mtbf_seconds, double(between / pairs)) > 1e-9) f.addf("history %d: MTBF mismatch", h);
        const double identity = *m.mttf_seconds + double(repair_head / pairs);
        if (relative_error(*m.mtbf_seconds, identity) > 1e-9) {
            f.addf("history %d: MTBF %.6f != MTTF + MTTR %.6f", h, *m.mtbf_seconds, identity);
        }
    }
}

void reliability_check(Failures& f) {
    const double lambdas[] = {1e-4, 0.02, 0.5, 3.0};
    for (double lt : {0.0, 0.1, 1.0, 5.0, 20.0}) {
        for (double lambda : lambdas) {
            const double hours = lt / lambda;
            const auto r = metrics::reliability(lambda, hours);
            const long double want = testing::exp_neg_oracle(static_cast<long double>(lambda) * hours);
            const double err = static_cast<double>(std::abs((r.r - want) / want));
            if (err > 1e-9) f.addf("lambda %g t %g: R %.17g vs %.17Lg", lambda, hours, r.r, want);
        }
    }
}

// Probe scenario through the HTTP webhook, incident workflow, record
// confirmation and the dashboard.
void end_to_end_check(Failures& f) {
    auto config = testing::sample_service_config();
    const metrics::TimeInterval march{at("2025-03-01T00:00:00Z"), at("2025-04-01T00:00:00Z")};
    config.reporting_period = march;
    ManualClock clock(at("2025-03-10T04:00:00Z"));
    service::Service svc(config, store::EventLog::in_memory(), clock.fn());
    service::ApiServer api(svc);
    testing::HttpClient http(api.bind("127.0.0.1", 0));
    api.start();

    const auto events = alerts::run_probe_scenario(
        "monitor probe-p1 interval 300\n"
        "down probe-p1 2025-03-10T04:00:00Z 2025-03-10T08:00:00Z\n");
    if (events.size() != 48) f.addf("scenario produced %zu firings, expected 48", events.size());
    std::map<std::string, int> classes;
    std::set<std::string> incidents;
    for (const auto& e : events) {
        clock.set(e.fired_at);
        const auto r = http.post("/api/v1/alerts", Json(e));
        if (r.status != 202) {
            f.addf("webhook returned %d", r.status);
            api.stop();
            return;
        }
        ++classes[r.body["classification"].get<std::string>()];
        incidents.insert(r.body["incident_id"].get<std::string>());
    }
    if (classes["created"] != 1 || incidents.size() != 1) {
        f.addf("expected one incident, got %zu", incidents.size());
        api.stop();
        return;
    }
    const std::string id = *incidents.begin();

    auto step = [&](const std::string& path, const Json& body, int want) {
        const auto r = http.post(path, body, "oncall");
        if (r.status != want) f.addf("POST %s returned %d: %s", path.c_str(), r.status, r.raw.c_str());
        return r;
    };
    clock.set(at("2025-03-10T08:20:00Z"));
    step("/api/v1/incidents/" + id + "/transition", {{"to", "Classified"}}, 200);
    step("/api/v1/incidents/" + id + "/transition", {{"to", "InProgress"}}, 200);
    step("/api/v1/incidents/" + id + "/transition",
         {{"to", "Resolved"},
          {"fields",
           {{"repaired_at", "2025-03-10T08:00:00Z"},
            {"recovered_at", "2025-03-10T08:00:00Z"},
            {"restored_at", "2025-03-10T08:00:00Z"}}}},
         200);
    const auto closed = step("/api/v1/incidents/" + id + "/close", Json::object(), 200);
    if (!f.ok() || !closed.body["outage_record"].is_object()) {
        f.add("close produced no outage record");
        api.stop();
        return;
    }
    const std::string record = closed.body["outage_record"]["id"];
    step("/api/v1/outage-records/" + record + "/review", {{"decision", "confirm"}}, 200);

    const auto dash = http.get("/api/v1/dashboard");
    api.stop();
    if (dash.status != 200) {
        f.addf("dashboard returned %d", dash.status);
        return;
    }
    const Json* row = nullptr;
    for (const auto& r : dash.body["rows"]) {
        if (r["product_id"] == "P1") row = &r;
    }
    if (row == nullptr) {
        f.add("no P1 row on the dashboard");
        return;
    }

    // Independent arithmetic: 31 days of 24x7 minutes, 240 of them down.
    const double planned_min = 31.0 * 24 * 60;
    const double down_min = 240.0;
    const double want_pct = std::round((1.0 - down_min / planned_min) * 100.0 * 1e4) / 1e4;
    const double want_margin = std::round((planned_min * (1.0 - 0.999) - down_min) * 100.0) / 100.0;
    const double got_pct = (*row)["availability_percent"].get<double>();
    const double got_margin = (*row)["margin_minutes"].get<double>();
    if (got_pct != want_pct || got_pct != 99.4624) f.addf("availability %.4f, expected 99.4624", got_pct);
    if (got_margin != want_margin || got_margin != -195.36) f.addf("margin %.2f, expected -195.36", got_margin);
    if ((*row)["met"] != false) f.add("99.9% SLA reported as met");
    if ((*row)["downtime_minutes"] != 240.0) f.add("downtime is not 240 minutes");
}

store::EventLog memory_log(const std::string& bytes) {
    auto storage = std::make_unique<store::MemoryStorage>();
    storage->bytes() = bytes;
    return store::EventLog(std::move(storage));
}

void workflow_uniqueness_check(Failures& f) {
    auto domain = testing::sample_domain();
    std::mt19937_64 rng(424242);
    std::size_t owed_records = 0, owed_problems = 0;
    for (int round = 0; round < 200; ++round) {
        ManualClock clock(at("2025-03-10T04:00:00Z"));
        auto storage = std::make_unique<store::MemoryStorage>();
        auto* raw = storage.get();
        store::Engine live(domain, store::EventLog(std::move(storage)), clock.fn());
        const auto outcome = testing::run_workload(live, clock, rng, 80);
        const auto state = live.state_copy();
        owed_records += outcome.owed_record.size();
        owed_problems += outcome.owed_problem.size();

        std::map<std::string, int> records, problems;
        for (const auto& [_, r] : state.records()) ++records[r.incident_id];
        for (const auto& [_, t] : state.problems()) ++problems[t.incident_id];
        for (const auto& [id, n] : records) {
            if (n != 1) f.addf("round %d: %d records for %s", round, n, id.c_str());
            if (!outcome.owed_record.contains(id)) f.addf("round %d: unexpected record for %s", round, id.c_str());
        }
        for (const auto& [id, n] : problems) {
            if (n > 1) f.addf("round %d: %d problems for %s", round, n, id.c_str());
        }
        for (const auto& id : outcome.owed_record) {
            if (records[id] != 1) f.addf("round %d: %s has no record", round, id.c_str());
        }
        for (const auto& id : outcome.owed_problem) {
            if (problems[id] != 1) f.addf("round %d: %s has no problem", round, id.c_str());
        }

        store::Engine replayed(domain, memory_log(raw->bytes()), clock.fn());
        const auto diff = Json::diff(live.snapshot(), replayed.snapshot());
        if (!diff.empty()) f.addf("round %d: replay differs: %.200s", round, diff.dump().c_str());
    }
    if (owed_records == 0 || owed_problems == 0) f.add("workload never produced a record or a problem");
}

// --- state machines ---------------------------------------------------------

namespace sm {

using namespace availd::incident;

const Timestamp kT0 = at("2025-03-10T04:00:00Z");
const Timestamp kT1 = at("2025-03-10T08:00:00Z");
const ProductSet kProducts{"P1"};

Incident reach(State target) {
    IncidentDetails d;
    d.id = "INC-1";
    d.product_ids = {"P1"};
    d.severity = Severity::Sev1;
    d.causes_outage = true;
    d.title = "down";
    d.actor = "alice";
    d.occurred_at = kT0;
    Incident inc = open_incident(d, kProducts, kT0);
    for (State s : {State::Classified, State::InProgress, State::Resolved}) {
        if (inc.state == target) return inc;
        inc = transition(inc, s, s == State::Resolved ? testing::resolve_fields(kT0, Seconds{3600}) : TransitionFields{},
                         "bob", kT1, kProducts);
    }
    if (target == State::Closed) inc = close_incident(inc, "bob", kT1, SeverityPolicy{}).incident;
    return inc;
}

void incidents(Failures& f) {
    const std::set<std::pair<State, State>> legal{{State::New, State::Classified},      {State::Classified, State::InProgress},
                                                  {State::InProgress, State::Resolved}, {State::Resolved, State::Closed},
                                                  {State::Resolved, State::InProgress}, {State::Closed, State::InProgress}};
    for (State from : kAllStates) {
        for (State to : kAllStates) {
            const Incident inc = reach(from);
            bool accepted = true;
            try {
                if (to == State::Closed) {
                    close_incident(inc, "bob", kT1, SeverityPolicy{});
                } else {
                    transition(inc, to, to == State::Resolved ? testing::resolve_fields(kT0, Seconds{3600}) : TransitionFields{},
                               "bob", kT1, kProducts);
                }
            } catch (const StateMachineError&) {
                accepted = false;
            }
            if (accepted != legal.contains({from, to})) {
                f.addf("incident %s->%s %s", to_string(from).c_str(), to_string(to).c_str(),
                       accepted ? "accepted" : "rejected");
            }
        }
    }
}

problem::RcaDocument rca() {
    problem::RcaDocument d;
    d.timeline = {{kT0, "alarm"}};
    d.fishbone[problem::FishboneCategory::Technology] = {"disk full"};
    d.five_whys = {{"why down?", "disk full", std::nullopt}};
    d.root_cause = "log rotation missing";
    d.corrective_actions = {{"enable rotation", "dana", kT1}};
    return d;
}

problem::ProblemTicket ticket(Timestamp t = kT0, const std::string& assignee = "dana") {
    return *problem::spawn_problem("PRB-1", {"INC-1", Severity::Sev1, {"P1"}, t}, SeverityPolicy{},
                                   {assignee, {"lead"}}, t);
}

void problems(Failures& f) {
    using problem::ProblemState;
    using problem::ReviewDecision;
    enum class Op { Submit, Approve, Reject };
    auto in_state = [](ProblemState s) {
        auto t = ticket();
        if (s == ProblemState::Open) return t;
        t = problem::submit_rca(t, rca(), kT1);
        if (s == ProblemState::Approved) t = problem::review_rca(t, "erin", ReviewDecision::Approve, "", kT1);
        return t;
    };
    for (ProblemState s : {ProblemState::Open, ProblemState::RcaSubmitted, ProblemState::Approved}) {
        for (Op op : {Op::Submit, Op::Approve, Op::Reject}) {
            const auto t = in_state(s);
            std::optional<ProblemState> got;
            try {
                switch (op) {
                    case Op::Submit: got = problem::submit_rca(t, rca(), kT1).state; break;
                    case Op::Approve: got = problem::review_rca(t, "erin", ReviewDecision::Approve, "", kT1).state; break;
                    case Op::Reject: got = problem::review_rca(t, "erin", ReviewDecision::Reject, "thin", kT1).state; break;
                }
            } catch (const StateMachineError&) {
            }
            std::optional<ProblemState> want;
            if (s == ProblemState::Open && op == Op::Submit) want = ProblemState::RcaSubmitted;
            if (s == ProblemState::RcaSubmitted && op == Op::Approve) want = ProblemState::Approved;
            // A rejected RCA sends the ticket back for rework.
            if (s == ProblemState::RcaSubmitted && op == Op::Reject) want = ProblemState::Open;
            if (got != want) f.addf("problem %s op %d", problem::to_string(s).c_str(), static_cast<int>(op));
        }
    }
}

const metrics::TimeInterval kWindow{at("2025-03-15T02:00:00Z"), at("2025-03-15T06:00:00Z")};

change::Release release_in(change::ReleaseState s) {
    using change::ReleaseState;
    auto r = change::create_release("REL-1", "spring", {"PBI-1"}, kWindow,
                                    {{"storage", "storage configured", true, change::ChecklistStatus::Pending, ""}}, "pm",
                                    kT0);
    if (s == ReleaseState::Planned) return r;
    if (s == ReleaseState::Cancelled) return change::cancel_release(r, "pm", kT0);
    r = change::run_prr(r, {{"storage", {change::ChecklistStatus::Passed, ""}}}, "qa", kT0);
    if (s == ReleaseState::PrrPassed) return r;
    r = change::approve_release(r, {}, "mrb", {}, kT0).release;
    if (s == ReleaseState::Approved) return r;
    return change::deploy_release(r, "ops", kT0);
}

void releases(Failures& f) {
    using change::ReleaseState;
    enum class Op { Prr, Approve, Deploy, Cancel };
    for (ReleaseState s : change::kAllReleaseStates) {
        for (Op op : {Op::Prr, Op::Approve, Op::Deploy, Op::Cancel}) {
            const auto r = release_in(s);
            std::optional<ReleaseState> got;
            try {
                switch (op) {
                    case Op::Prr:
                        got = change::run_prr(r, {{"storage", {change::ChecklistStatus::Passed, ""}}}, "qa", kT0).state;
                        break;
                    case Op::Approve: got = change::approve_release(r, {}, "mrb", {}, kT0).release.state; break;
                    case Op::Deploy: got = change::deploy_release(r, "ops", kT0).state; break;
                    case Op::Cancel: got = change::cancel_release(r, "pm", kT0).state; break;
                }
            } catch (const StateMachineError&) {
            }
            std::optional<ReleaseState> want;
            if (s == ReleaseState::Planned && op == Op::Prr) want = ReleaseState::PrrPassed;
            if (s == ReleaseState::PrrPassed && op == Op::Approve) want = ReleaseState::Approved;
            if (s == ReleaseState::Approved && op == Op::Deploy) want = ReleaseState::Deployed;
            if (op == Op::Cancel && s != ReleaseState::Deployed && s != ReleaseState::Cancelled) {
                want = ReleaseState::Cancelled;
            }
            if (got != want) f.addf("release %s op %d", change::to_string(s).c_str(), static_cast<int>(op));
        }
    }
}

change::ChangeRequest fresh_change() {
    change::ChangeRequest c;
    c.description = "patch kernel";
    c.product_ids = {"P1"};
    return change::request_change("CHG-1", c, kT0);
}

void changes(Failures& f) {
    using change::ChangeDecision;
    using change::ChangeState;
    enum class Op { Approve, Reject, Execute, Verify };
    auto apply = [](const change::ChangeRequest& c, Op op) {
        switch (op) {
            case Op::Approve: return change::review_change(c, ChangeDecision::Approve, "mrb", kT0);
            case Op::Reject: return change::review_change(c, ChangeDecision::Reject, "mrb", kT0);
            case Op::Execute: return change::execute_change(c, "dba", kT0);
            case Op::Verify: return change::verify_change(c, "qa", kT0);
        }
        return c;
    };
    auto in_state = [&](ChangeState s) {
        auto c = fresh_change();
        if (s == ChangeState::Requested) return c;
        if (s == ChangeState::Rejected) return apply(c, Op::Reject);
        c = apply(c, Op::Approve);
        if (s == ChangeState::Approved) return c;
        c = apply(c, Op::Execute);
        if (s == ChangeState::Executed) return c;
        return apply(c, Op::Verify);
    };
    for (ChangeState s : change::kAllChangeStates) {
        for (Op op : {Op::Approve, Op::Reject, Op::Execute, Op::Verify}) {
            std::optional<ChangeState> got;
            try {
                got = apply(in_state(s), op).state;
            } catch (const StateMachineError&) {
            } catch (const AuthorizationOrderError&) {
            }
            std::optional<ChangeState> want;
            if (s == ChangeState::Requested && op == Op::Approve) want = ChangeState::Approved;
            if (s == ChangeState::Requested && op == Op::Reject) want = ChangeState::Rejected;
            if (s == ChangeState::Approved && op == Op::Execute) want = ChangeState::Executed;
            if (s == ChangeState::Executed && op == Op::Verify) want = ChangeState::Verified;
            if (got != want) f.addf("change %s op %d", change::to_string(s).c_str(), static_cast<int>(op));
        }
    }

    std::mt19937_64 rng(7);
    for (int round = 0; round < 2000; ++round) {
        auto c = fresh_change();
        for (int i = 0; i < 8; ++i) {
            try {
                c = apply(c, static_cast<Op>(rng() % 4));
            } catch (const Error&) {
            }
        }
        bool approved = false;
        for (const auto& h : c.history) {
            if (h.to == "Approved") approved = true;
            if (h.to == "Executed" && !approved) f.addf("round %d executed without approval", round);
        }
        if ((c.state == ChangeState::Executed || c.state == ChangeState::Verified) && !approved) {
            f.addf("round %d reached %s without approval", round, change::to_string(c.state).c_str());
        }
    }
}

}  // namespace sm

void state_machine_check(Failures& f) {
    sm::incidents(f);
    sm::problems(f);
    sm::releases(f);
    sm::changes(f);
}

void rca_sla_check(Failures& f) {
    using problem::ReviewDecision;
    std::mt19937_64 rng(10);
    for (int i = 0; i < 200; ++i) {
        const Timestamp t = from_unix(1700000000 + static_cast<std::int64_t>(rng() % (400 * 86400)));
        const std::string assignee = "owner-" + std::to_string(rng() % 7);
        const auto ticket = sm::ticket(t, assignee);
        // Calendar days in UTC: exactly 864000 seconds later.
        if (to_unix(ticket.due_at) - to_unix(t) != 10 * 86400) f.addf("ticket %d due_at off", i);

        if (!problem::submit_rca(ticket, sm::rca(), t + 12 * kDay).submitted_late) {
            f.addf("ticket %d: T+12d submission not late", i);
        }
        if (problem::submit_rca(ticket, sm::rca(), t + 10 * kDay).submitted_late) {
            f.addf("ticket %d: T+10d submission late", i);
        }
        const auto submitted = problem::submit_rca(ticket, sm::rca(), t + kDay);
        for (auto d : {ReviewDecision::Approve, ReviewDecision::Reject}) {
            try {
                problem::review_rca(submitted, assignee, d, "self", t + 2 * kDay);
                f.addf("ticket %d: self-review accepted", i);
            } catch (const IndependenceError&) {
            }
        }
    }

    // Through the engine: the assignee comes from the product resolver.
    ManualClock clock(at("2025-03-10T04:00:00Z"));
    store::Engine engine(testing::sample_domain(), store::EventLog::in_memory(), clock.fn());
    const auto a = engine.ingest_alert({"probe-p1", clock.now(), 1.0, "probe failed"});
    engine.transition_incident(a.incident_id, incident::State::Classified, {}, "alice");
    engine.transition_incident(a.incident_id, incident::State::InProgress, {}, "alice");
    engine.transition_incident(a.incident_id, incident::State::Resolved,
                               testing::resolve_fields(clock.now(), Seconds{600}), "alice");
    clock.advance(Seconds{1200});
    const Timestamp spawned = clock.now();
    const auto closed = engine.close_incident(a.incident_id, "alice");
    if (!closed.problem) {
        f.add("Sev1 close spawned no problem ticket");
        return;
    }
    if (closed.problem->due_at != spawned + 10 * kDay) f.add("engine ticket due_at off");
    clock.set(spawned + 12 * kDay);
    const auto submitted = engine.submit_rca(closed.problem->id, sm::rca());
    if (!submitted.submitted_late) f.add("engine T+12d submission not late");
    try {
        engine.review_rca(submitted.id, submitted.assignee, ReviewDecision::Approve, "");
        f.add("engine accepted self-review");
    } catch (const IndependenceError&) {
    }
}

struct Criterion {
    const char* name;
    std::function<void(Failures&)> run;
    double limit_seconds;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"nines ladder downtime budgets", nines_ladder_check, 1.0},
        {"availability vs minute-grid oracle (1000 cases)", availability_oracle_check, 30.0},
        {"lifecycle identity (500 histories)", lifecycle_identity_check, 0.0},
        {"reliability vs exponential oracle", reliability_check, 0.0},
        {"end-to-end probe outage over HTTP", end_to_end_check, 10.0},
        {"workflow uniqueness and replay (200 sequences)", workflow_uniqueness_check, 0.0},
        {"state-machine exhaustion", state_machine_check, 0.0},
        {"RCA due date, lateness and review independence", rca_sla_check, 0.0},
    };

    bool all = true;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        Failures f;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(f);
        } catch (const std::exception& e) {
            f.add(std::string("exception: ") + e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && elapsed >= c.limit_seconds) f.addf("took %.3f s, limit %.0f s", elapsed, c.limit_seconds);
        all = all && f.ok();
        std::printf("%s  %d  %s (%.3f s)%s%s\n", f.ok() ? "PASS" : "FAIL", index, c.name, elapsed,
                    f.ok() ? "" : ": ", f.summary().c_str());
        std::fflush(stdout);
    }

    // Field results from the original deployment cannot be re-run here; this
    // line passes only when every substitute property suite above passed.
    ++index;
    std::printf("%s  %d  field results: not reproducible by design; %s\n", all ? "PASS" : "FAIL", index,
                all ? "substitute property suites passed" : "substitute property suites failed");
    return all ? 0 : 1;
}
