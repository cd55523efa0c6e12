#pragma once

// Availability, reliability and incident-lifecycle arithmetic.
//
// Everything here is a pure function of its arguments: no clock, no storage.

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "availd/core/time.hpp"

namespace availd::metrics {

/// Half-open interval [start, end) with start < end.
class TimeInterval {
public:
    /// Throws ValidationError when end <= start.
    TimeInterval(Timestamp start, Timestamp end);

    Timestamp start() const noexcept { return start_; }
    Timestamp end() const noexcept { return end_; }
    Seconds length() const noexcept { return end_ - start_; }

    bool contains(Timestamp at) const noexcept { return at >= start_ && at < end_; }
    bool overlaps(const TimeInterval& other) const noexcept {
        return start_ < other.end_ && other.start_ < end_;
    }
    /// Intersection, or nullopt when the two do not overlap.
    std::optional<TimeInterval> clipped_to(const TimeInterval& bounds) const;

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;

private:
    Timestamp start_;
    Timestamp end_;
};

/// One recurring planned-uptime window. Offsets are seconds from midnight UTC,
/// `end_offset` may be 86400 to run to the end of the day.
struct WeeklyWindow {
    std::chrono::weekday day;
    Seconds start_offset;
    Seconds end_offset;

    friend bool operator==(const WeeklyWindow&, const WeeklyWindow&) = default;
};

/// Planned operations: weekly windows minus absolute maintenance exceptions.
class OperationsSchedule {
public:
    /// Throws ValidationError on an empty window list, a non-positive window,
    /// a window outside [0, 86400] or two overlapping windows on one weekday.
    explicit OperationsSchedule(std::vector<WeeklyWindow> weekly_windows,
                                std::vector<TimeInterval> maintenance_exceptions = {});

    static OperationsSchedule always_on(std::vector<TimeInterval> maintenance_exceptions = {});
    /// Monday to Friday, `[start, end)` each day.
    static OperationsSchedule weekdays(Seconds start_offset, Seconds end_offset,
                                       std::vector<TimeInterval> maintenance_exceptions = {});

    const std::vector<WeeklyWindow>& weekly_windows() const noexcept { return weekly_windows_; }
    const std::vector<TimeInterval>& maintenance_exceptions() const noexcept {
        return maintenance_exceptions_;
    }

    friend bool operator==(const OperationsSchedule&, const OperationsSchedule&) = default;

private:
    std::vector<WeeklyWindow> weekly_windows_;
    std::vector<TimeInterval> maintenance_exceptions_;
};

struct AvailabilityResult {
    Seconds planned{0};
    Seconds downtime{0};
    Seconds uptime{0};
    /// Absent when nothing was planned: availability is undefined, not 0 or 100.
    std::optional<double> availability_percent;

    bool has_planned_uptime() const noexcept { return planned.count() > 0; }
};

enum class NinesLabel { TwoNines, ThreeNines, FourNines, FiveNines };

std::string to_string(NinesLabel label);

struct NinesTier {
    NinesLabel label;
    double percent;
    FractionalSeconds downtime_per_year;
    FractionalSeconds downtime_per_week;
};

struct LifecycleMetrics {
    std::optional<double> mttf_seconds;
    std::optional<double> mttr_seconds;
    std::optional<double> mtbf_seconds;
    std::size_t mttf_samples = 0;
    std::size_t mttr_samples = 0;
    std::size_t mtbf_samples = 0;
};

struct ReliabilityEstimate {
    double lambda_per_hour;
    double hours;
    double r;

    double percent() const noexcept { return r * 100.0; }
};

struct SlaEvaluation {
    bool met;
    /// Allowed minus actual downtime; negative on breach.
    FractionalSeconds margin;
};

/// One incident's failure span: occurrence to restoration.
struct FailureSpan {
    Timestamp occurred_at;
    Timestamp restored_at;
};

/// Sorts and merges overlapping or abutting intervals.
std::vector<TimeInterval> merge_intervals(std::vector<TimeInterval> intervals);

/// Planned windows instantiated over `period`, maintenance removed, clipped,
/// disjoint and sorted. Abutting windows (e.g. midnight) are merged.
std::vector<TimeInterval> expand_schedule(const OperationsSchedule& schedule, const TimeInterval& period);

Seconds total_length(std::span<const TimeInterval> intervals);

/// `planned` must be disjoint and sorted; outages may overlap and are unioned.
AvailabilityResult compute_availability(std::span<const TimeInterval> planned,
                                        std::span<const TimeInterval> outages);

/// The four tiers of the classic availability ladder.
std::vector<NinesTier> nines_ladder();

/// (1 - target/100) x planned time. Throws ValidationError unless 0 < target <= 100.
FractionalSeconds allowed_downtime(double target_percent, const TimeInterval& period,
                                   const OperationsSchedule& schedule);
FractionalSeconds allowed_downtime(double target_percent, Seconds planned);

/// R(t) = exp(-lambda t). Throws ValidationError on negative inputs.
ReliabilityEstimate reliability(double lambda_per_hour, double hours);

/// failures / exposure hours. Throws ValidationError when exposure <= 0.
double estimate_failure_intensity(std::size_t failure_count, double exposure_hours);

/// MTTR over all spans; MTTF and MTBF over consecutive pairs (absent below two spans).
/// An empty history yields all metrics absent. Throws ValidationError on
/// inverted, overlapping or unordered spans.
LifecycleMetrics lifecycle_metrics(std::span<const FailureSpan> history);

SlaEvaluation evaluate_sla(double target_percent, const AvailabilityResult& result);

/// Reporting precision: 4 decimals of percent.
double round_percent(double percent);
/// Minutes rounded to 2 decimals.
double to_report_minutes(FractionalSeconds duration);

}  // namespace availd::metrics
