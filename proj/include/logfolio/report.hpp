#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "logfolio/backtest.hpp"
#include "logfolio/diagnostics.hpp"
#include "logfolio/errors.hpp"
#include "logfolio/logprice.hpp"
#include "logfolio/strategies.hpp"
#include "logfolio/types.hpp"

namespace logfolio {

using Json = nlohmann::ordered_json;

constexpr int kReportSchemaVersion = 1;

// Machine-readable record of one CLI run. Everything except generated_at is
// a pure function of the input bytes and flags. Floats are rounded to 12
// significant digits before serialization, so dump/parse round-trips are
// lossless at that precision. Bulk series go to sibling CSV files, keeping
// the report diff-friendly.
struct RunReport {
    std::string command;
    std::string generated_at;                        // RFC 3339 UTC timestamp
    std::map<std::string, std::string> inputs_digest;  // role -> content hash
    Json parameters = Json::object();
    Json result = Json::object();
    int schema_version = kReportSchemaVersion;
};

namespace detail {

inline Json jnum(double v) { return Json(round_sig12(v)); }

}  // namespace detail

// FNV-1a 64-bit over raw bytes, hex-encoded. Identical bytes, identical tag.
inline std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

inline Json to_json(const ResidualDiagnostics& d) {
    return Json{{"mean", detail::jnum(d.mean)},
                {"std_dev", detail::jnum(d.std_dev)},
                {"lag1_autocorr", detail::jnum(d.lag1_autocorr)},
                {"rel_spread", detail::jnum(d.rel_spread)},
                {"whiteness_score", detail::jnum(d.whiteness_score)}};
}

inline Json to_json(const PortfolioPlan& plan) {
    Json weights = Json::array();
    for (const auto& [id, beta] : plan.weights) {
        weights.push_back(Json{{"code", id.code}, {"beta", detail::jnum(beta)}});
    }
    Json j{{"weights", std::move(weights)},
           {"intercept", detail::jnum(plan.intercept)},
           {"sum_positive", detail::jnum(plan.sum_positive)},
           {"cash_fraction", detail::jnum(plan.cash_fraction)},
           {"margin_fraction", detail::jnum(plan.margin_fraction)},
           {"r_squared", detail::jnum(plan.r_squared)},
           {"diagnostics", to_json(plan.diagnostics)}};
    if (plan.target_rate) j["target_rate"] = detail::jnum(*plan.target_rate);
    return j;
}

inline Json to_json(const SelectionReport& report) {
    Json funds = Json::array();
    for (const auto& fr : report.per_fund) {
        funds.push_back(Json{{"code", fr.fund.code},
                             {"beta", detail::jnum(fr.beta)},
                             {"r_squared", detail::jnum(fr.r_squared)},
                             {"diagnostics", to_json(fr.diagnostics)},
                             {"residual_csv", "residual_" + fr.fund.code + ".csv"}});
    }
    Json ranking = Json::array();
    for (const auto& id : report.ranking) ranking.push_back(id.code);
    return Json{{"funds", std::move(funds)}, {"ranking", std::move(ranking)}};
}

inline Json to_json(const TrackingStats& stats) {
    return Json{{"mean_abs_error", detail::jnum(stats.mean_abs_error)},
                {"max_abs_error", detail::jnum(stats.max_abs_error)},
                {"realized_annual_rate", detail::jnum(stats.realized_annual_rate)},
                {"correlation", detail::jnum(stats.correlation)}};
}

inline Json to_json(const HoldoutReport& report) {
    return Json{{"train_rows", report.train_rows},
                {"test_rows", report.test_rows},
                {"in_sample", to_json(report.in_sample)},
                {"out_of_sample", to_json(report.out_of_sample)}};
}

inline Json to_json(const CounterexampleResult& r) {
    return Json{{"steps", r.naive_returns.size()},
                {"seed", r.seed},
                {"max_abs_deviation", detail::jnum(r.max_abs_deviation)},
                {"csv", "sim.csv"}};
}

inline Json to_json(const RunReport& report) {
    return Json{{"schema_version", report.schema_version},
                {"command", report.command},
                {"generated_at", report.generated_at},
                {"inputs_digest", report.inputs_digest},
                {"parameters", report.parameters},
                {"result", report.result}};
}

inline RunReport run_report_from_json(const Json& j) {
    RunReport report;
    report.schema_version = j.at("schema_version").get<int>();
    report.command = j.at("command").get<std::string>();
    report.generated_at = j.at("generated_at").get<std::string>();
    report.inputs_digest = j.at("inputs_digest").get<std::map<std::string, std::string>>();
    report.parameters = j.at("parameters");
    report.result = j.at("result");
    return report;
}

inline std::string serialize(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

inline RunReport parse_run_report(const std::string& text) {
    return run_report_from_json(Json::parse(text));
}

// Structural check against the published schema (docs/report.schema.json).
// Throws ParseError with the offending path on the first violation.
inline void validate_report(const Json& j) {
    auto require = [&](bool ok, const std::string& what) {
        if (!ok) throw ParseError("report schema violation: " + what);
    };
    require(j.is_object(), "root must be an object");
    require(j.contains("schema_version") && j["schema_version"].is_number_integer(),
            "schema_version must be an integer");
    require(j["schema_version"].get<int>() == kReportSchemaVersion, "unknown schema_version");
    require(j.contains("command") && j["command"].is_string(), "command must be a string");
    static const std::vector<std::string> commands = {"select",   "replicate", "construct",
                                                      "sweep",    "simulate",  "backtest",
                                                      "validate"};
    const std::string cmd = j["command"].get<std::string>();
    require(std::find(commands.begin(), commands.end(), cmd) != commands.end(),
            "unknown command '" + cmd + "'");
    require(j.contains("generated_at") && j["generated_at"].is_string(),
            "generated_at must be a string");
    require(j.contains("inputs_digest") && j["inputs_digest"].is_object(),
            "inputs_digest must be an object");
    for (const auto& [key, value] : j["inputs_digest"].items()) {
        require(value.is_string() && value.get<std::string>().size() == 16,
                "inputs_digest." + key + " must be a 16-hex-char string");
    }
    require(j.contains("parameters") && j["parameters"].is_object(),
            "parameters must be an object");
    require(j.contains("result") && j["result"].is_object(), "result must be an object");

    const Json& r = j["result"];
    auto require_diag = [&](const Json& d, const std::string& path) {
        require(d.is_object(), path + " must be an object");
        for (const char* key :
             {"mean", "std_dev", "lag1_autocorr", "rel_spread", "whiteness_score"}) {
            require(d.contains(key) && d[key].is_number(), path + "." + key + " must be a number");
        }
    };
    auto require_plan = [&](const Json& p, const std::string& path) {
        require(p.is_object(), path + " must be an object");
        require(p.contains("weights") && p["weights"].is_array(), path + ".weights must be an array");
        for (const auto& w : p["weights"]) {
            require(w.contains("code") && w["code"].is_string() && w.contains("beta") &&
                        w["beta"].is_number(),
                    path + ".weights entries must carry code and beta");
        }
        for (const char* key :
             {"intercept", "sum_positive", "cash_fraction", "margin_fraction", "r_squared"}) {
            require(p.contains(key) && p[key].is_number(), path + "." + key + " must be a number");
        }
        require_diag(p["diagnostics"], path + ".diagnostics");
    };

    if (cmd == "select") {
        require(r.contains("funds") && r["funds"].is_array(), "result.funds must be an array");
        for (const auto& f : r["funds"]) {
            require(f.contains("code") && f["code"].is_string(), "fund entries need a code");
            require(f.contains("beta") && f["beta"].is_number(), "fund entries need a beta");
            require(f.contains("r_squared") && f["r_squared"].is_number(),
                    "fund entries need r_squared");
            require_diag(f["diagnostics"], "result.funds[].diagnostics");
        }
        require(r.contains("ranking") && r["ranking"].is_array(), "result.ranking must be an array");
        require(r["ranking"].size() == r["funds"].size(), "ranking must cover every fund");
    } else if (cmd == "replicate" || cmd == "construct") {
        require_plan(r.contains("plan") ? r["plan"] : Json(), "result.plan");
    } else if (cmd == "sweep") {
        require(r.contains("plans") && r["plans"].is_array(), "result.plans must be an array");
        for (const auto& p : r["plans"]) require_plan(p, "result.plans[]");
    } else if (cmd == "simulate") {
        for (const char* key : {"steps", "seed"}) {
            require(r.contains(key) && r[key].is_number_integer(),
                    std::string("result.") + key + " must be an integer");
        }
        require(r.contains("max_abs_deviation") && r["max_abs_deviation"].is_number(),
                "result.max_abs_deviation must be a number");
    } else if (cmd == "backtest") {
        require_plan(r.contains("plan") ? r["plan"] : Json(), "result.plan");
        for (const char* key : {"synthetic", "buy_and_hold"}) {
            require(r.contains(key) && r[key].is_object(),
                    std::string("result.") + key + " must be an object");
            for (const char* stat : {"mean_abs_error", "max_abs_error", "realized_annual_rate",
                                     "correlation"}) {
                require(r[key].contains(stat) && r[key][stat].is_number(),
                        std::string("result.") + key + "." + stat + " must be a number");
            }
        }
        require(r.contains("max_nav_divergence") && r["max_nav_divergence"].is_number(),
                "result.max_nav_divergence must be a number");
    } else if (cmd == "validate") {
        require(r.contains("train_rows") && r["train_rows"].is_number_integer(),
                "result.train_rows must be an integer");
        require(r.contains("test_rows") && r["test_rows"].is_number_integer(),
                "result.test_rows must be an integer");
        require_diag(r.contains("in_sample") ? r["in_sample"] : Json(), "result.in_sample");
        require_diag(r.contains("out_of_sample") ? r["out_of_sample"] : Json(),
                     "result.out_of_sample");
    }
}

}  // namespace logfolio
