#pragma once

#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "availd/service/config.hpp"
#include "availd/service/views.hpp"
#include "availd/store/engine.hpp"

namespace availd::service {

/// Engine plus the dashboard job. The dashboard is recomputed when a record
/// is confirmed and on a timer; readers always see a complete snapshot.
class Service {
public:
    Service(ServiceConfig config, store::EventLog log, store::Clock clock = store::system_clock(),
            const std::optional<Json>& snapshot = std::nullopt);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Opens `data_dir/events.ndjson`, resuming from `snapshot.json` when present.
    static std::unique_ptr<Service> open(ServiceConfig config, const std::filesystem::path& data_dir,
                                         store::Clock clock = store::system_clock());

    store::Engine& engine() { return engine_; }
    const store::Engine& engine() const { return engine_; }
    const ServiceConfig& config() const { return config_; }

    /// Calendar year-to-date in UTC unless the configuration fixes a period.
    metrics::TimeInterval default_period() const;

    std::shared_ptr<const DashboardSnapshot> dashboard() const;
    /// Recomputes and swaps the snapshot. On failure logs and keeps the old one.
    void refresh_dashboard();

    Json availability(const std::string& product_id, const metrics::TimeInterval& period, View view) const;
    Json executive_report(const metrics::TimeInterval& period) const;

    /// Timer thread refreshing every refresh_interval_seconds of wall time.
    void start_refresh_timer();
    void stop_refresh_timer();

    /// Writes `snapshot.json` when the service was opened from a data dir.
    void write_snapshot() const;

private:
    ServiceConfig config_;
    store::Engine engine_;
    std::optional<std::filesystem::path> data_dir_;

    mutable std::mutex snapshot_mu_;
    std::shared_ptr<const DashboardSnapshot> snapshot_;

    std::mutex timer_mu_;
    std::condition_variable timer_cv_;
    bool stopping_ = false;
    std::thread timer_;
};

}  // namespace availd::service
