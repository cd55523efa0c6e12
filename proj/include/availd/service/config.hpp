#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "availd/core/json.hpp"
#include "availd/core/metrics.hpp"
#include "availd/store/state.hpp"

namespace availd::service {

struct ProductConfig {
    std::string id;
    std::string name;
    double sla_target_percent = 99.9;
    metrics::OperationsSchedule schedule = metrics::OperationsSchedule::always_on();
    std::optional<problem::Resolver> resolver;
};

struct ServiceConfig {
    std::vector<ProductConfig> products;
    std::vector<alerts::MonitorProfile> monitors;
    std::set<incident::Severity> significant_severities{incident::Severity::Sev1, incident::Severity::Sev2};
    int rca_sla_days = problem::kDefaultRcaSlaDays;
    std::int64_t refresh_interval_seconds = 60;
    std::int64_t correlation_window_hours = 72;
    std::vector<metrics::TimeInterval> release_windows;
    std::vector<metrics::TimeInterval> freeze_windows;
    problem::Resolver default_resolver{"problem-manager", {}};
    /// Fixed dashboard period; calendar year-to-date when absent.
    std::optional<metrics::TimeInterval> reporting_period;
    /// Directory of static console assets served at "/", if set.
    std::optional<std::string> static_dir;

    const ProductConfig* product(std::string_view id) const;
    std::shared_ptr<const store::DomainConfig> domain() const;
};

using Environment = std::map<std::string, std::string>;

/// AVAILD_* variables of the current process.
Environment process_environment();

/// Replaces top-level key `k` with env `AVAILD_<K>` (value parsed as JSON when
/// possible, else taken as a string).
Json apply_env_overrides(Json config, const Environment& env);

/// Parses and validates; throws ValidationError listing every problem found.
ServiceConfig parse_config(const Json& document);
ServiceConfig load_config(const std::filesystem::path& path, const Environment& env = process_environment());

Json to_json(const ServiceConfig& config);

}  // namespace availd::service
