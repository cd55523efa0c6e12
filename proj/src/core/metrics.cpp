#include "availd/core/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "availd/core/error.hpp"

namespace availd::metrics {

namespace {

constexpr Seconds kDay{kSecondsPerDay};

std::string describe(const WeeklyWindow& w) {
    return "weekday " + std::to_string(w.day.c_encoding()) + " [" + std::to_string(w.start_offset.count()) +
           ", " + std::to_string(w.end_offset.count()) + ")";
}

}  // namespace

TimeInterval::TimeInterval(Timestamp start, Timestamp end) : start_(start), end_(end) {
    if (!(start < end)) {
        throw ValidationError("interval start must precede end: [" + format_rfc3339(start) + ", " +
                              format_rfc3339(end) + ")");
    }
}

std::optional<TimeInterval> TimeInterval::clipped_to(const TimeInterval& bounds) const {
    const Timestamp s = std::max(start_, bounds.start_);
    const Timestamp e = std::min(end_, bounds.end_);
    if (s < e) return TimeInterval{s, e};
    return std::nullopt;
}

OperationsSchedule::OperationsSchedule(std::vector<WeeklyWindow> weekly_windows,
                                       std::vector<TimeInterval> maintenance_exceptions)
    : weekly_windows_(std::move(weekly_windows)), maintenance_exceptions_(std::move(maintenance_exceptions)) {
    if (weekly_windows_.empty()) {
        throw ValidationError("operations schedule needs at least one weekly window");
    }
    std::vector<std::string> problems;
    for (const auto& w : weekly_windows_) {
        if (!w.day.ok()) problems.push_back("invalid weekday in " + describe(w));
        if (w.start_offset.count() < 0 || w.end_offset > kDay) {
            problems.push_back("window outside the day: " + describe(w));
        }
        if (w.end_offset <= w.start_offset) problems.push_back("window has no duration: " + describe(w));
    }
    std::vector<WeeklyWindow> sorted = weekly_windows_;
    std::sort(sorted.begin(), sorted.end(), [](const WeeklyWindow& a, const WeeklyWindow& b) {
        if (a.day.c_encoding() != b.day.c_encoding()) return a.day.c_encoding() < b.day.c_encoding();
        return a.start_offset < b.start_offset;
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].day == sorted[i - 1].day && sorted[i].start_offset < sorted[i - 1].end_offset) {
            problems.push_back("overlapping windows: " + describe(sorted[i - 1]) + " and " + describe(sorted[i]));
        }
    }
    if (!problems.empty()) throw ValidationError("invalid operations schedule", std::move(problems));
}

OperationsSchedule OperationsSchedule::always_on(std::vector<TimeInterval> maintenance_exceptions) {
    std::vector<WeeklyWindow> windows;
    for (unsigned d = 0; d < 7; ++d) windows.push_back({std::chrono::weekday{d}, Seconds{0}, kDay});
    return OperationsSchedule{std::move(windows), std::move(maintenance_exceptions)};
}

OperationsSchedule OperationsSchedule::weekdays(Seconds start_offset, Seconds end_offset,
                                                std::vector<TimeInterval> maintenance_exceptions) {
    std::vector<WeeklyWindow> windows;
    for (unsigned d = 1; d <= 5; ++d) windows.push_back({std::chrono::weekday{d}, start_offset, end_offset});
    return OperationsSchedule{std::move(windows), std::move(maintenance_exceptions)};
}

std::string to_string(NinesLabel label) {
    switch (label) {
        case NinesLabel::TwoNines: return "two-nines";
        case NinesLabel::ThreeNines: return "three-nines";
        case NinesLabel::FourNines: return "four-nines";
        case NinesLabel::FiveNines: return "five-nines";
    }
    return "unknown";
}

std::vector<TimeInterval> merge_intervals(std::vector<TimeInterval> intervals) {
    std::sort(intervals.begin(), intervals.end(), [](const TimeInterval& a, const TimeInterval& b) {
        return a.start() < b.start() || (a.start() == b.start() && a.end() < b.end());
    });
    std::vector<TimeInterval> merged;
    merged.reserve(intervals.size());
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.start() <= merged.back().end()) {
            if (iv.end() > merged.back().end()) merged.back() = TimeInterval{merged.back().start(), iv.end()};
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

std::vector<TimeInterval> expand_schedule(const OperationsSchedule& schedule, const TimeInterval& period) {
    std::vector<TimeInterval> windows;
    // Start one day early so a window that began before the period is still clipped in.
    for (Timestamp day = start_of_day(period.start()) - kDay; day < period.end(); day += kDay) {
        const std::chrono::weekday wd{std::chrono::floor<std::chrono::days>(day)};
        for (const auto& w : schedule.weekly_windows()) {
            if (w.day != wd) continue;
            const TimeInterval instance{day + w.start_offset, day + w.end_offset};
            if (auto clipped = instance.clipped_to(period)) windows.push_back(*clipped);
        }
    }
    windows = merge_intervals(std::move(windows));

    const auto exceptions = merge_intervals(schedule.maintenance_exceptions());
    if (exceptions.empty()) return windows;

    std::vector<TimeInterval> planned;
    auto ex = exceptions.begin();
    for (const auto& w : windows) {
        Timestamp cursor = w.start();
        while (ex != exceptions.end() && ex->end() <= cursor) ++ex;
        for (auto it = ex; it != exceptions.end() && it->start() < w.end(); ++it) {
            if (it->start() > cursor) planned.emplace_back(cursor, it->start());
            cursor = std::max(cursor, it->end());
        }
        if (cursor < w.end()) planned.emplace_back(cursor, w.end());
    }
    return planned;
}

Seconds total_length(std::span<const TimeInterval> intervals) {
    Seconds total{0};
    for (const auto& iv : intervals) total += iv.length();
    return total;
}

AvailabilityResult compute_availability(std::span<const TimeInterval> planned,
                                        std::span<const TimeInterval> outages) {
    AvailabilityResult result;
    result.planned = total_length(planned);

    const auto merged = merge_intervals({outages.begin(), outages.end()});
    // Both lists are sorted and disjoint: sweep them together.
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < planned.size() && j < merged.size()) {
        const Timestamp s = std::max(planned[i].start(), merged[j].start());
        const Timestamp e = std::min(planned[i].end(), merged[j].end());
        if (s < e) result.downtime += e - s;
        if (planned[i].end() < merged[j].end()) {
            ++i;
        } else {
            ++j;
        }
    }
    result.uptime = result.planned - result.downtime;
    if (result.planned.count() > 0) {
        result.availability_percent =
            100.0 * static_cast<double>(result.uptime.count()) / static_cast<double>(result.planned.count());
    }
    return result;
}

std::vector<NinesTier> nines_ladder() {
    constexpr double kYear = 365.0 * kSecondsPerDay;
    constexpr double kWeek = 7.0 * kSecondsPerDay;
    constexpr std::array<std::pair<NinesLabel, double>, 4> tiers{{
        {NinesLabel::TwoNines, 99.0},
        {NinesLabel::ThreeNines, 99.9},
        {NinesLabel::FourNines, 99.99},
        {NinesLabel::FiveNines, 99.999},
    }};
    std::vector<NinesTier> ladder;
    for (const auto& [label, percent] : tiers) {
        const double unavailable = (100.0 - percent) / 100.0;
        ladder.push_back({label, percent, FractionalSeconds{unavailable * kYear},
                          FractionalSeconds{unavailable * kWeek}});
    }
    return ladder;
}

FractionalSeconds allowed_downtime(double target_percent, Seconds planned) {
    if (!(target_percent > 0.0 && target_percent <= 100.0)) {
        throw ValidationError("SLA target must be in (0, 100], got " + std::to_string(target_percent));
    }
    return FractionalSeconds{(100.0 - target_percent) / 100.0 * static_cast<double>(planned.count())};
}

FractionalSeconds allowed_downtime(double target_percent, const TimeInterval& period,
                                   const OperationsSchedule& schedule) {
    if (!(target_percent > 0.0 && target_percent <= 100.0)) {
        throw ValidationError("SLA target must be in (0, 100], got " + std::to_string(target_percent));
    }
    return allowed_downtime(target_percent, total_length(expand_schedule(schedule, period)));
}

ReliabilityEstimate reliability(double lambda_per_hour, double hours) {
    if (!(lambda_per_hour >= 0.0) || !(hours >= 0.0)) {
        throw ValidationError("reliability needs lambda >= 0 and t >= 0");
    }
    return {lambda_per_hour, hours, std::exp(-lambda_per_hour * hours)};
}

double estimate_failure_intensity(std::size_t failure_count, double exposure_hours) {
    if (!(exposure_hours > 0.0)) throw ValidationError("exposure must be positive");
    return static_cast<double>(failure_count) / exposure_hours;
}

LifecycleMetrics lifecycle_metrics(std::span<const FailureSpan> history) {
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (!(history[i].occurred_at < history[i].restored_at)) {
            throw ValidationError("incident " + std::to_string(i) + " is restored before it occurred");
        }
        if (i > 0 && history[i].occurred_at < history[i - 1].restored_at) {
            throw ValidationError("incident " + std::to_string(i) + " overlaps or precedes incident " +
                                  std::to_string(i - 1));
        }
    }
    LifecycleMetrics m;
    if (history.empty()) return m;

    double repair = 0.0;
    for (const auto& span : history) repair += static_cast<double>((span.restored_at - span.occurred_at).count());
    m.mttr_samples = history.size();
    m.mttr_seconds = repair / static_cast<double>(history.size());

    if (history.size() < 2) return m;
    double up = 0.0;
    double between = 0.0;
    for (std::size_t i = 1; i < history.size(); ++i) {
        up += static_cast<double>((history[i].occurred_at - history[i - 1].restored_at).count());
        between += static_cast<double>((history[i].occurred_at - history[i - 1].occurred_at).count());
    }
    const double pairs = static_cast<double>(history.size() - 1);
    m.mttf_samples = m.mtbf_samples = history.size() - 1;
    m.mttf_seconds = up / pairs;
    m.mtbf_seconds = between / pairs;
    return m;
}

SlaEvaluation evaluate_sla(double target_percent, const AvailabilityResult& result) {
    const FractionalSeconds allowed = allowed_downtime(target_percent, result.planned);
    const FractionalSeconds margin = allowed - FractionalSeconds{result.downtime};
    if (!result.availability_percent) return {true, margin};
    return {*result.availability_percent >= target_percent, margin};
}

double round_percent(double percent) { return std::round(percent * 1e4) / 1e4; }

double to_report_minutes(FractionalSeconds duration) {
    return std::round(duration.count() / 60.0 * 100.0) / 100.0;
}

}  // namespace availd::metrics
