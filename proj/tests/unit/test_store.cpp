#include <doctest.h>

#include <fstream>
#include <random>

#include "availd/core/error.hpp"
#include "availd/store/engine.hpp"
#include "support/fixtures.hpp"
#include "support/workload.hpp"

using namespace availd;
using namespace availd::store;
using availd::testing::ManualClock;

namespace {

Timestamp at(const char* text) { return parse_rfc3339(text); }

const Timestamp kT0 = at("2025-03-10T04:00:00Z");

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::trunc);
    out << bytes;
}

EventLog memory_log(const std::string& bytes) {
    auto storage = std::make_unique<MemoryStorage>();
    storage->bytes() = bytes;
    return EventLog(std::move(storage));
}

std::string log_bytes(const std::vector<StoredEvent>& events) {
    std::string s;
    for (const auto& e : events) s += to_line(e);
    return s;
}

// Runs the canonical outage flow and returns the engine's log.
std::vector<StoredEvent> outage_flow(Engine& engine, ManualClock& clock) {
    const auto a = engine.ingest_alert({"probe-p1", kT0, 1.0, "probe failed"});
    clock.advance(Seconds{600});
    engine.transition_incident(a.incident_id, incident::State::Classified, {}, "alice");
    engine.transition_incident(a.incident_id, incident::State::InProgress, {}, "alice");
    clock.set(at("2025-03-10T08:30:00Z"));
    engine.transition_incident(a.incident_id, incident::State::Resolved,
                               testing::resolve_fields(kT0, Seconds{240 * 60}), "alice");
    const auto closed = engine.close_incident(a.incident_id, "alice");
    engine.review_outage(closed.record->id, records::ReviewDecision::Confirm, {}, "carol", "");
    return engine.export_events();
}

}  // namespace

TEST_CASE("append assigns gapless seqs; malformed payload consumes nothing") {
    auto log = EventLog::in_memory();
    CHECK(log.append("incident.opened", "INC-1", Json::object(), kT0).seq == 1);
    CHECK(log.append("incident.opened", "INC-2", Json::object(), kT0).seq == 2);
    CHECK_THROWS_AS(log.append("incident.opened", "INC-3", Json::array(), kT0), ValidationError);
    CHECK_THROWS_AS(log.append("", "INC-3", Json::object(), kT0), ValidationError);
    CHECK(log.append("incident.opened", "INC-3", Json::object(), kT0).seq == 3);
    const auto events = log.read();
    REQUIRE(events.size() == 3);
    CHECK(events[2].entity_id == "INC-3");
    CHECK(events[2].schema_version == kSchemaVersion);
}

TEST_CASE("file log survives reopen") {
    testing::TempDir dir;
    const auto path = dir.path() / "events.ndjson";
    {
        auto log = EventLog::open_file(path);
        log.append("a.b", "x", Json{{"k", 1}}, kT0);
        log.append("a.b", "y", Json{{"k", 2}}, kT0);
    }
    auto log = EventLog::open_file(path);
    CHECK(log.last_seq() == 2);
    CHECK(log.append("a.b", "z", Json::object(), kT0).seq == 3);
    CHECK(log.read(2).size() == 2);
}

TEST_CASE("truncated last line: recover complete records with a warning") {
    testing::TempDir dir;
    const auto path = dir.path() / "events.ndjson";
    {
        auto log = EventLog::open_file(path);
        for (int i = 0; i < 3; ++i) log.append("a.b", "x", Json{{"i", i}}, kT0);
    }
    std::string bytes = slurp(path);
    spit(path, bytes.substr(0, bytes.size() - 9));
    auto log = EventLog::open_file(path);
    REQUIRE(log.open_warning());
    CHECK(log.open_warning()->find("after seq 2") != std::string::npos);
    CHECK(log.last_seq() == 2);
    CHECK(log.append("a.b", "x", Json::object(), kT0).seq == 3);
    CHECK(log.read().size() == 3);
}

TEST_CASE("gaps and mid-log corruption halt replay at the offending seq") {
    auto log = EventLog::in_memory();
    for (int i = 0; i < 4; ++i) log.append("a.b", "x", Json{{"i", i}}, kT0);
    auto events = log.read();

    auto gap = events;
    gap.erase(gap.begin() + 1);
    try {
        parse_log(log_bytes(gap));
        FAIL("expected a replay error");
    } catch (const ReplayError& e) {
        CHECK(e.seq() == 3);
    }

    std::string bytes = log_bytes(events);
    const auto second_line = bytes.find('\n') + 1;
    bytes[second_line + 3] = '#';
    try {
        parse_log(bytes);
        FAIL("expected a replay error");
    } catch (const ReplayError& e) {
        CHECK(e.seq() == 2);
    }
    CHECK_THROWS_AS(memory_log(bytes), ReplayError);
}

TEST_CASE("empty log replays to empty state") {
    ManualClock clock(kT0);
    Engine engine(testing::sample_domain(), EventLog::in_memory(), clock.fn());
    CHECK(engine.read([](const State& s) { return s.incidents().empty() && s.records().empty(); }));
    CHECK(engine.last_seq() == 0);
}

TEST_CASE("storage failure refuses the mutation and leaves state untouched") {
    ManualClock clock(kT0);
    auto storage = std::make_unique<MemoryStorage>();
    auto* raw = storage.get();
    Engine engine(testing::sample_domain(), EventLog(std::move(storage)), clock.fn());
    incident::IncidentDetails d;
    d.product_ids = {"P1"};
    d.title = "disk";
    engine.open_incident(d);
    const auto before = engine.snapshot();
    raw->fail_next_append = true;
    CHECK_THROWS_AS(engine.open_incident(d), StoreError);
    CHECK(engine.snapshot() == before);
    CHECK(engine.open_incident(d).id == "INC-000002");
}

TEST_CASE("outage flow: replay, snapshot and export/import all agree") {
    ManualClock clock(kT0);
    auto domain = testing::sample_domain();
    Engine live(domain, EventLog::in_memory(), clock.fn());
    const auto events = outage_flow(live, clock);

    const auto live_json = live.snapshot();
    const auto& rec = live_json["state"]["outage_records"];
    REQUIRE(rec.size() == 1);
    CHECK(rec[0]["state"] == "Confirmed");
    CHECK(live_json["state"]["problems"].size() == 1);
    CHECK(live_json["state"]["problems"][0]["assignee"] == "dana");

    Engine replayed(domain, memory_log(log_bytes(events)), clock.fn());
    CHECK(Json::diff(replayed.snapshot(), live_json).empty());

    // Snapshot after half the log plus the tail.
    Engine half(domain, memory_log(log_bytes({events.begin(), events.begin() + 4})), clock.fn());
    Engine resumed(domain, memory_log(log_bytes(events)), clock.fn(), std::optional<Json>(half.snapshot()));
    CHECK(Json::diff(resumed.snapshot(), live_json).empty());

    // A snapshot ahead of the log is ignored with a warning.
    Engine short_log(domain, memory_log(log_bytes({events.begin(), events.begin() + 2})), clock.fn(), std::optional<Json>(live_json));
    CHECK_FALSE(short_log.warnings().empty());

    // Import into an empty store, then re-import: idempotent.
    Engine target(domain, EventLog::in_memory(), clock.fn());
    CHECK(target.import_events(events) == events.size());
    CHECK(target.import_events(events) == 0);
    CHECK(Json::diff(target.snapshot(), live_json).empty());

    // A conflicting event is refused and nothing changes.
    auto tampered = events;
    tampered[1].payload["actor"] = "mallory";
    CHECK_THROWS_AS(target.import_events(tampered), StoreError);
    auto beyond = events.back();
    beyond.seq += 5;
    CHECK_THROWS_AS(target.import_events({beyond}), StoreError);
    CHECK(Json::diff(target.snapshot(), live_json).empty());
}

TEST_CASE("redelivered workflow outputs are no-ops") {
    ManualClock clock(kT0);
    Engine engine(testing::sample_domain(), EventLog::in_memory(), clock.fn());
    outage_flow(engine, clock);
    const auto state = engine.state_copy();
    const auto& inc = state.incidents().begin()->second;
    const auto& rec = state.records().begin()->second;
    CHECK(engine.deliver_outage_draft({inc.id, inc.product_ids, rec.drafted_outage}).id == rec.id);
    const auto ticket = engine.deliver_problem_trigger({inc.id, inc.severity, inc.product_ids, clock.now()});
    REQUIRE(ticket);
    CHECK(ticket->id == state.problems().begin()->first);
    CHECK(engine.read([](const State& s) { return s.records().size() + s.problems().size(); }) == 2);
}

TEST_CASE("crash between close and follow-up is repaired on start") {
    ManualClock clock(kT0);
    auto domain = testing::sample_domain();
    Engine live(domain, EventLog::in_memory(), clock.fn());
    auto events = outage_flow(live, clock);
    // Drop everything after the close event.
    const auto close_at = std::find_if(events.begin(), events.end(),
                                       [](const StoredEvent& e) { return e.kind == kinds::kIncidentClosed; });
    events.erase(close_at + 1, events.end());
    Engine restarted(domain, memory_log(log_bytes(events)), clock.fn());
    CHECK(restarted.warnings().size() == 2);
    CHECK(restarted.read([](const State& s) { return s.records().size() == 1 && s.problems().size() == 1; }));
}

TEST_CASE("randomized sequences: unique workflow outputs and replay equals live") {
    auto domain = testing::sample_domain();
    std::mt19937_64 rng(2025);
    for (int round = 0; round < 25; ++round) {
        ManualClock clock(kT0);
        auto storage = std::make_unique<MemoryStorage>();
        auto* raw = storage.get();
        Engine live(domain, EventLog(std::move(storage)), clock.fn());
        const auto outcome = testing::run_workload(live, clock, rng, 80);
        const auto state = live.state_copy();

        std::map<std::string, int> records_per_incident, problems_per_incident;
        for (const auto& [_, r] : state.records()) ++records_per_incident[r.incident_id];
        for (const auto& [_, t] : state.problems()) ++problems_per_incident[t.incident_id];
        for (const auto& [id, n] : records_per_incident) CHECK(n == 1);
        for (const auto& [id, n] : problems_per_incident) CHECK(n == 1);
        for (const auto& id : outcome.owed_record) CHECK(records_per_incident[id] == 1);
        for (const auto& id : outcome.owed_problem) CHECK(problems_per_incident[id] == 1);
        CHECK(records_per_incident.size() == outcome.owed_record.size());

        Engine replayed(domain, memory_log(raw->bytes()), clock.fn());
        const auto diff = Json::diff(live.snapshot(), replayed.snapshot());
        CHECK_MESSAGE(diff.empty(), diff.dump());
    }
}
