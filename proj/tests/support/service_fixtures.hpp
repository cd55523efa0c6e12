#pragma once

#include "availd/service/config.hpp"

namespace availd::testing {

/// Service configuration matching sample_domain(): P1 24x7 at 99.9%,
/// P2 24x7 at 99.0%, P3 weekdays at 99.5%; probe-p1 and cpu-p2 monitors.
inline Json sample_config_json() {
    return Json::parse(R"({
      "products": [
        {"id": "P1", "name": "Order Entry", "sla_target_percent": 99.9, "schedule": "24x7",
         "resolver": {"assignee": "dana", "management_chain": ["lead-p1", "director"]}},
        {"id": "P2", "name": "Billing", "sla_target_percent": 99.0, "schedule": "24x7"},
        {"id": "P3", "name": "Reporting", "sla_target_percent": 99.5, "schedule": "weekdays 08:00-18:00"}
      ],
      "monitors": [
        {"monitor_id": "probe-p1", "product_id": "P1", "layer": "external-probe", "metric": "probe_failed",
         "comparator": ">=", "threshold": 1, "severity_on_fire": "Sev1", "dedup_window_seconds": 1800,
         "opens_outage": true},
        {"monitor_id": "cpu-p2", "product_id": "P2", "layer": "infrastructure", "metric": "cpu_percent",
         "comparator": ">", "threshold": 90, "severity_on_fire": "Sev3", "dedup_window_seconds": 1800,
         "opens_outage": false}
      ],
      "default_resolver": {"assignee": "pat", "management_chain": ["director"]}
    })");
}

inline service::ServiceConfig sample_service_config() { return service::parse_config(sample_config_json()); }

}  // namespace availd::testing
