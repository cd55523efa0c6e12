#pragma once

// nlohmann/json bindings for the shared value types. Timestamps travel as
// RFC3339 UTC strings, durations as integer seconds.

#include <json.hpp>
#include <optional>
#include <string>

#include "availd/core/error.hpp"
#include "availd/core/metrics.hpp"
#include "availd/core/time.hpp"

namespace nlohmann {

template <typename T>
struct adl_serializer<std::optional<T>> {
    static void to_json(json& j, const std::optional<T>& value) {
        if (value) {
            j = *value;
        } else {
            j = nullptr;
        }
    }
    static void from_json(const json& j, std::optional<T>& value) {
        if (j.is_null()) {
            value.reset();
        } else {
            value = j.get<T>();
        }
    }
};

template <>
struct adl_serializer<availd::Timestamp> {
    static void to_json(json& j, const availd::Timestamp& at) { j = availd::format_rfc3339(at); }
    static void from_json(const json& j, availd::Timestamp& at) {
        at = availd::parse_rfc3339(j.get<std::string>());
    }
};

template <>
struct adl_serializer<availd::Seconds> {
    static void to_json(json& j, const availd::Seconds& s) { j = s.count(); }
    static void from_json(const json& j, availd::Seconds& s) { s = availd::Seconds{j.get<std::int64_t>()}; }
};

template <>
struct adl_serializer<availd::metrics::TimeInterval> {
    static void to_json(json& j, const availd::metrics::TimeInterval& iv) {
        j = json{{"start", iv.start()}, {"end", iv.end()}};
    }
    static availd::metrics::TimeInterval from_json(const json& j) {
        return {j.at("start").get<availd::Timestamp>(), j.at("end").get<availd::Timestamp>()};
    }
};

template <>
struct adl_serializer<availd::metrics::OperationsSchedule> {
    /// Accepts the shorthand strings "24x7" and "weekdays HH:MM-HH:MM" or an
    /// object {weekly_windows: [{day, start, end}], maintenance: [interval]}.
    static void to_json(json& j, const availd::metrics::OperationsSchedule& schedule);
    static availd::metrics::OperationsSchedule from_json(const json& j);
};

}  // namespace nlohmann

namespace availd {

using Json = nlohmann::json;

/// Rethrows a nlohmann parse/type error as ValidationError naming `context`.
[[noreturn]] void rethrow_as_validation(const std::exception& e, const std::string& context);

/// Reads a required member, converting nlohmann exceptions into ValidationError
/// that names the field.
template <typename T>
T required(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
        throw ValidationError(std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        rethrow_as_validation(e, key);
    }
}

template <typename T>
std::optional<T> optional_field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
    try {
        return j.at(key).get<T>();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        rethrow_as_validation(e, key);
    }
}

}  // namespace availd
