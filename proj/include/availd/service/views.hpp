#pragma once

// Read-side projections: availability views, dashboard rows and the
// executive report. All are pure functions of store content and period.

#include <optional>
#include <string>
#include <vector>

#include "availd/core/json.hpp"
#include "availd/service/config.hpp"
#include "availd/store/state.hpp"

namespace availd::service {

enum class View { Percent, Minutes };
View parse_view(const std::string& text);

struct ProductAvailability {
    std::string product_id;
    std::string name;
    double sla_target_percent = 0.0;
    metrics::TimeInterval period;
    metrics::AvailabilityResult result;
    FractionalSeconds allowed{0};
    metrics::SlaEvaluation sla{true, FractionalSeconds{0}};
};

ProductAvailability product_availability(const ProductConfig& product,
                                         const std::vector<records::OutageRecord>& records,
                                         const metrics::TimeInterval& period);

Json availability_view(const ProductAvailability& a, View view);

inline constexpr const char* kNoPlannedUptime = "no planned uptime";

struct DashboardRow {
    std::string product_id;
    std::string name;
    double sla_target_percent = 0.0;
    std::optional<double> availability_percent;
    double planned_minutes = 0.0;
    double downtime_minutes = 0.0;
    double allowed_downtime_minutes = 0.0;
    double margin_minutes = 0.0;
    bool met = true;
    std::optional<std::string> flag;

    friend bool operator==(const DashboardRow&, const DashboardRow&) = default;
};

DashboardRow dashboard_row(const ProductAvailability& a);

struct DashboardSnapshot {
    Timestamp generated_at;
    metrics::TimeInterval period;
    std::uint64_t as_of_seq = 0;
    std::vector<DashboardRow> rows;
};

/// One row per configured product, in configuration order.
DashboardSnapshot compute_dashboard(const ServiceConfig& config, const store::State& state,
                                    const metrics::TimeInterval& period, Timestamp now);

Json to_json(const DashboardRow& row);
Json to_json(const DashboardSnapshot& snapshot);

/// Incident volumes, SLA attainment, RCA backlog (as of the period end),
/// change counts and breaches for `period`.
Json executive_report(const ServiceConfig& config, const store::State& state, const metrics::TimeInterval& period);
std::string render_executive_text(const Json& report);

}  // namespace availd::service
