#include "availd/service/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

extern char** environ;

namespace availd::service {

namespace {

constexpr const char* kKnownKeys[] = {"products",
                                      "monitors",
                                      "significant_severities",
                                      "rca_sla_days",
                                      "refresh_interval_seconds",
                                      "correlation_window_hours",
                                      "release_windows",
                                      "freeze_windows",
                                      "default_resolver",
                                      "reporting_period",
                                      "static_dir"};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

problem::Resolver resolver_from_json(const Json& j) {
    return problem::Resolver{required<std::string>(j, "assignee"),
                             j.value("management_chain", std::vector<std::string>{})};
}

Json resolver_to_json(const problem::Resolver& r) {
    return Json{{"assignee", r.assignee}, {"management_chain", r.management_chain}};
}

// Runs `f`, turning any failure into an itemized problem prefixed by `where`.
template <class F>
void collect(std::vector<std::string>& problems, const std::string& where, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        std::string msg = where + ": " + e.what();
        for (const auto& d : e.details()) msg += "; " + d;
        problems.push_back(msg);
    } catch (const std::exception& e) {
        problems.push_back(where + ": " + e.what());
    }
}

}  // namespace

const ProductConfig* ServiceConfig::product(std::string_view id) const {
    const auto it = std::find_if(products.begin(), products.end(), [&](const ProductConfig& p) { return p.id == id; });
    return it == products.end() ? nullptr : &*it;
}

std::shared_ptr<const store::DomainConfig> ServiceConfig::domain() const {
    auto d = std::make_shared<store::DomainConfig>();
    for (const auto& p : products) {
        d->products.insert(p.id);
        if (p.resolver) d->resolvers[p.id] = *p.resolver;
    }
    d->default_resolver = default_resolver;
    for (const auto& m : monitors) d->monitors[m.monitor_id] = m;
    d->policy.significant = significant_severities;
    d->rca_sla_days = rca_sla_days;
    d->calendar.release_windows = release_windows;
    d->calendar.freeze_windows = freeze_windows;
    return d;
}

Environment process_environment() {
    Environment env;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        const std::string entry(*e);
        if (entry.rfind("AVAILD_", 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        env[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    return env;
}

Json apply_env_overrides(Json config, const Environment& env) {
    if (!config.is_object()) return config;
    for (const char* key : kKnownKeys) {
        const auto it = env.find("AVAILD_" + upper(key));
        if (it == env.end()) continue;
        try {
            config[key] = Json::parse(it->second);
        } catch (const Json::parse_error&) {
            config[key] = it->second;
        }
    }
    return config;
}

ServiceConfig parse_config(const Json& doc) {
    if (!doc.is_object()) throw ValidationError("configuration must be a JSON object");
    ServiceConfig c;
    std::vector<std::string> problems;

    for (const auto& [key, _] : doc.items()) {
        if (std::find_if(std::begin(kKnownKeys), std::end(kKnownKeys), [&](const char* k) { return key == k; }) ==
            std::end(kKnownKeys)) {
            problems.push_back("unknown configuration key '" + key + "'");
        }
    }

    const Json products = doc.value("products", Json::array());
    if (!products.is_array() || products.empty()) problems.emplace_back("products: at least one product is required");
    std::set<std::string> product_ids;
    if (products.is_array()) {
        for (std::size_t i = 0; i < products.size(); ++i) {
            collect(problems, "products[" + std::to_string(i) + "]", [&] {
                const Json& p = products[i];
                ProductConfig pc;
                pc.id = required<std::string>(p, "id");
                if (pc.id.empty()) throw ValidationError("id must not be empty");
                if (!product_ids.insert(pc.id).second) throw ValidationError("duplicate product id '" + pc.id + "'");
                pc.name = p.value("name", pc.id);
                pc.sla_target_percent = required<double>(p, "sla_target_percent");
                if (!(pc.sla_target_percent > 0.0 && pc.sla_target_percent <= 100.0)) {
                    throw ValidationError("sla_target_percent must be in (0, 100]");
                }
                if (p.contains("schedule")) pc.schedule = required<metrics::OperationsSchedule>(p, "schedule");
                if (p.contains("resolver")) pc.resolver = resolver_from_json(p.at("resolver"));
                c.products.push_back(std::move(pc));
            });
        }
    }

    const Json monitors = doc.value("monitors", Json::array());
    std::set<std::string> monitor_ids;
    for (std::size_t i = 0; i < monitors.size(); ++i) {
        collect(problems, "monitors[" + std::to_string(i) + "]", [&] {
            auto m = monitors[i].get<alerts::MonitorProfile>();
            alerts::validate(m);
            if (!product_ids.contains(m.product_id)) {
                throw ValidationError("monitor '" + m.monitor_id + "' references unknown product '" + m.product_id +
                                      "'");
            }
            if (!monitor_ids.insert(m.monitor_id).second) {
                throw ValidationError("duplicate monitor id '" + m.monitor_id + "'");
            }
            c.monitors.push_back(std::move(m));
        });
    }

    if (doc.contains("significant_severities")) {
        collect(problems, "significant_severities", [&] {
            c.significant_severities.clear();
            for (const auto& s : doc.at("significant_severities")) {
                c.significant_severities.insert(incident::parse_severity(s.get<std::string>()));
            }
        });
    }
    collect(problems, "rca_sla_days", [&] {
        c.rca_sla_days = doc.value("rca_sla_days", c.rca_sla_days);
        if (c.rca_sla_days <= 0) throw ValidationError("must be positive");
    });
    collect(problems, "refresh_interval_seconds", [&] {
        c.refresh_interval_seconds = doc.value("refresh_interval_seconds", c.refresh_interval_seconds);
        if (c.refresh_interval_seconds <= 0) throw ValidationError("must be positive");
    });
    collect(problems, "correlation_window_hours", [&] {
        c.correlation_window_hours = doc.value("correlation_window_hours", c.correlation_window_hours);
        if (c.correlation_window_hours <= 0) throw ValidationError("must be positive");
    });
    collect(problems, "release_windows", [&] {
        c.release_windows = doc.value("release_windows", std::vector<metrics::TimeInterval>{});
    });
    collect(problems, "freeze_windows", [&] {
        c.freeze_windows = doc.value("freeze_windows", std::vector<metrics::TimeInterval>{});
    });
    if (doc.contains("default_resolver")) {
        collect(problems, "default_resolver", [&] { c.default_resolver = resolver_from_json(doc.at("default_resolver")); });
    }
    if (doc.contains("reporting_period") && !doc.at("reporting_period").is_null()) {
        collect(problems, "reporting_period", [&] { c.reporting_period = doc.at("reporting_period").get<metrics::TimeInterval>(); });
    }
    collect(problems, "static_dir", [&] { c.static_dir = optional_field<std::string>(doc, "static_dir"); });

    if (!problems.empty()) throw ValidationError("invalid configuration", std::move(problems));
    return c;
}

ServiceConfig load_config(const std::filesystem::path& path, const Environment& env) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read configuration file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    Json doc;
    try {
        doc = Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw ValidationError("configuration file " + path.string() + " is not valid JSON", {e.what()});
    }
    return parse_config(apply_env_overrides(std::move(doc), env));
}

Json to_json(const ServiceConfig& c) {
    Json products = Json::array();
    for (const auto& p : c.products) {
        Json j{{"id", p.id}, {"name", p.name}, {"sla_target_percent", p.sla_target_percent}, {"schedule", p.schedule}};
        if (p.resolver) j["resolver"] = resolver_to_json(*p.resolver);
        products.push_back(std::move(j));
    }
    Json severities = Json::array();
    for (auto s : c.significant_severities) severities.push_back(incident::to_string(s));
    return Json{{"products", products},
                {"monitors", c.monitors},
                {"significant_severities", severities},
                {"rca_sla_days", c.rca_sla_days},
                {"refresh_interval_seconds", c.refresh_interval_seconds},
                {"correlation_window_hours", c.correlation_window_hours},
                {"release_windows", c.release_windows},
                {"freeze_windows", c.freeze_windows},
                {"default_resolver", resolver_to_json(c.default_resolver)},
                {"reporting_period", c.reporting_period},
                {"static_dir", c.static_dir}};
}

}  // namespace availd::service
