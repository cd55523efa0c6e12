#include "availd/core/json.hpp"

#include <array>
#include <cstdio>

namespace availd {

void rethrow_as_validation(const std::exception& e, const std::string& context) {
    throw ValidationError("invalid value for '" + context + "': " + e.what());
}

namespace {

constexpr std::array<const char*, 7> kDayNames{"sun", "mon", "tue", "wed", "thu", "fri", "sat"};

std::chrono::weekday parse_day(const std::string& name) {
    for (unsigned i = 0; i < kDayNames.size(); ++i) {
        if (name == kDayNames[i]) return std::chrono::weekday{i};
    }
    throw ValidationError("unknown weekday '" + name + "' (expected sun..sat)");
}

/// "HH:MM" with 24:00 allowed as end of day.
Seconds parse_clock(const std::string& text) {
    unsigned h = 0, m = 0;
    char tail = 0;
    if (text.size() != 5 || std::sscanf(text.c_str(), "%2u:%2u%c", &h, &m, &tail) != 2 || m > 59 ||
        h > 24 || (h == 24 && m != 0)) {
        throw ValidationError("malformed time of day '" + text + "' (expected HH:MM)");
    }
    return Seconds{h * 3600 + m * 60};
}

std::string format_clock(Seconds offset) {
    char buf[48];
    const auto total = offset.count();
    std::snprintf(buf, sizeof buf, "%02lld:%02lld", static_cast<long long>(total / 3600),
                  static_cast<long long>((total % 3600) / 60));
    return buf;
}

}  // namespace

}  // namespace availd

namespace nlohmann {

using availd::metrics::OperationsSchedule;
using availd::metrics::TimeInterval;
using availd::metrics::WeeklyWindow;

void adl_serializer<OperationsSchedule>::to_json(json& j, const OperationsSchedule& schedule) {
    json windows = json::array();
    for (const auto& w : schedule.weekly_windows()) {
        windows.push_back({{"day", availd::kDayNames[w.day.c_encoding()]},
                           {"start", availd::format_clock(w.start_offset)},
                           {"end", availd::format_clock(w.end_offset)}});
    }
    j = json{{"weekly_windows", windows}, {"maintenance", schedule.maintenance_exceptions()}};
}

OperationsSchedule adl_serializer<OperationsSchedule>::from_json(const json& j) {
    using availd::ValidationError;
    if (j.is_string()) {
        const auto text = j.get<std::string>();
        if (text == "24x7") return OperationsSchedule::always_on();
        if (text.rfind("weekdays ", 0) == 0 && text.size() == 20 && text[14] == '-') {
            return OperationsSchedule::weekdays(availd::parse_clock(text.substr(9, 5)),
                                                availd::parse_clock(text.substr(15, 5)));
        }
        throw ValidationError("unknown schedule shorthand '" + text + "'");
    }
    if (!j.is_object()) throw ValidationError("schedule must be a string or an object");
    std::vector<WeeklyWindow> windows;
    for (const auto& w : j.value("weekly_windows", json::array())) {
        windows.push_back({availd::parse_day(availd::required<std::string>(w, "day")),
                           availd::parse_clock(availd::required<std::string>(w, "start")),
                           availd::parse_clock(availd::required<std::string>(w, "end"))});
    }
    std::vector<TimeInterval> maintenance;
    for (const auto& m : j.value("maintenance", json::array())) maintenance.push_back(m.get<TimeInterval>());
    return OperationsSchedule{std::move(windows), std::move(maintenance)};
}

}  // namespace nlohmann
