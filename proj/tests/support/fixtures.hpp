#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "availd/store/engine.hpp"

namespace availd::testing {

/// Clock the test advances by hand.
class ManualClock {
public:
    explicit ManualClock(Timestamp start) : now_(to_unix(start)) {}
    Timestamp now() const { return from_unix(now_.load()); }
    void set(Timestamp t) { now_ = to_unix(t); }
    void advance(Seconds s) { now_ += s.count(); }
    store::Clock fn() {
        return [this] { return now(); };
    }

private:
    std::atomic<std::int64_t> now_;
};

inline std::shared_ptr<store::DomainConfig> sample_domain() {
    auto d = std::make_shared<store::DomainConfig>();
    d->products = {"P1", "P2", "P3"};
    d->resolvers["P1"] = problem::Resolver{"dana", {"lead-p1", "director"}};
    d->default_resolver = problem::Resolver{"pat", {"director"}};

    alerts::MonitorProfile probe;
    probe.monitor_id = "probe-p1";
    probe.product_id = "P1";
    probe.layer = alerts::MonitorLayer::ExternalProbe;
    probe.metric = "probe_failed";
    probe.comparator = alerts::Comparator::GreaterEqual;
    probe.threshold = 1.0;
    probe.severity_on_fire = incident::Severity::Sev1;
    probe.dedup_window = Seconds{1800};
    probe.opens_outage = true;
    d->monitors[probe.monitor_id] = probe;

    alerts::MonitorProfile cpu = probe;
    cpu.monitor_id = "cpu-p2";
    cpu.product_id = "P2";
    cpu.layer = alerts::MonitorLayer::Infrastructure;
    cpu.metric = "cpu_percent";
    cpu.comparator = alerts::Comparator::Greater;
    cpu.threshold = 90;
    cpu.severity_on_fire = incident::Severity::Sev3;
    cpu.opens_outage = false;
    d->monitors[cpu.monitor_id] = cpu;
    return d;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("availd-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Lifecycle fields for resolving an outage incident that occurred at `occurred`.
inline incident::TransitionFields resolve_fields(Timestamp occurred, Seconds length) {
    incident::TransitionFields f;
    f.repaired_at = occurred + length;
    f.recovered_at = occurred + length;
    f.restored_at = occurred + length;
    return f;
}

}  // namespace availd::testing
