#include "availd/service/service.hpp"

#include <spdlog/spdlog.h>

namespace availd::service {

Service::Service(ServiceConfig config, store::EventLog log, store::Clock clock, const std::optional<Json>& snapshot)
    : config_(std::move(config)), engine_(config_.domain(), std::move(log), std::move(clock), snapshot) {
    for (const auto& w : engine_.warnings()) spdlog::warn("{}", w);
    refresh_dashboard();
    engine_.on_refresh([this] { refresh_dashboard(); });
}

Service::~Service() { stop_refresh_timer(); }

std::unique_ptr<Service> Service::open(ServiceConfig config, const std::filesystem::path& data_dir,
                                       store::Clock clock) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir, ec);
    if (ec) throw StoreError("cannot create data directory " + data_dir.string(), {ec.message()});
    auto snapshot = store::load_snapshot(data_dir / "snapshot.json");
    auto svc = std::make_unique<Service>(std::move(config), store::EventLog::open_file(data_dir / "events.ndjson"),
                                         std::move(clock), snapshot);
    svc->data_dir_ = data_dir;
    return svc;
}

metrics::TimeInterval Service::default_period() const {
    if (config_.reporting_period) return *config_.reporting_period;
    const auto now = engine_.now();
    const auto start = start_of_year(now);
    // The first second of the year still needs a non-empty interval.
    return {start, std::max(now, start + Seconds{1})};
}

std::shared_ptr<const DashboardSnapshot> Service::dashboard() const {
    std::lock_guard lock(snapshot_mu_);
    return snapshot_;
}

void Service::refresh_dashboard() {
    try {
        const auto period = default_period();
        const auto now = engine_.now();
        auto next = std::make_shared<const DashboardSnapshot>(
            engine_.read([&](const store::State& s) { return compute_dashboard(config_, s, period, now); }));
        std::lock_guard lock(snapshot_mu_);
        snapshot_ = std::move(next);
    } catch (const std::exception& e) {
        spdlog::error("dashboard refresh failed, keeping previous snapshot: {}", e.what());
    }
}

Json Service::availability(const std::string& product_id, const metrics::TimeInterval& period, View view) const {
    const auto* product = config_.product(product_id);
    if (product == nullptr) throw NotFoundError("unknown product '" + product_id + "'");
    const auto records = engine_.read([](const store::State& s) { return store::State::values(s.records()); });
    return availability_view(product_availability(*product, records, period), view);
}

Json Service::executive_report(const metrics::TimeInterval& period) const {
    return engine_.read([&](const store::State& s) { return service::executive_report(config_, s, period); });
}

void Service::start_refresh_timer() {
    std::lock_guard lock(timer_mu_);
    if (timer_.joinable()) return;
    stopping_ = false;
    timer_ = std::thread([this] {
        std::unique_lock lk(timer_mu_);
        const auto interval = std::chrono::seconds(config_.refresh_interval_seconds);
        while (!timer_cv_.wait_for(lk, interval, [this] { return stopping_; })) {
            lk.unlock();
            refresh_dashboard();
            lk.lock();
        }
    });
}

void Service::stop_refresh_timer() {
    {
        std::lock_guard lock(timer_mu_);
        stopping_ = true;
    }
    timer_cv_.notify_all();
    if (timer_.joinable()) timer_.join();
}

void Service::write_snapshot() const {
    if (data_dir_) engine_.write_snapshot(*data_dir_ / "snapshot.json");
}

}  // namespace availd::service
