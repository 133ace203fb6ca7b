#pragma once

#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubeh/errors.hpp"

namespace tubeh {

using Json = nlohmann::ordered_json;

/** @brief One measured quantity compared with its bound or target. */
struct CheckRecord {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    std::string relation;  // "<=", ">=", "<", "=="
    double tolerance = 0.0;
    bool pass = false;
};

inline CheckRecord check_le(std::string name, double measured, double bound, double tol = 0.0) {
    return {std::move(name), measured, bound, "<=", tol, measured <= bound + tol};
}
inline CheckRecord check_lt(std::string name, double measured, double bound) {
    return {std::move(name), measured, bound, "<", 0.0, measured < bound};
}
inline CheckRecord check_ge(std::string name, double measured, double bound, double tol = 0.0) {
    return {std::move(name), measured, bound, ">=", tol, measured >= bound - tol};
}
inline CheckRecord check_near(std::string name, double measured, double target, double tol) {
    return {std::move(name), measured, target, "==", tol, std::abs(measured - target) <= tol};
}
inline CheckRecord check_true(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", 0.0, ok}; }

/** @brief Named numeric table, emitted as CSV next to the report. */
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string csv() const {
        std::ostringstream os;
        os << std::setprecision(17);
        for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
            os << "\n";
        }
        return os.str();
    }
};

struct StageReport {
    std::string name;
    std::vector<CheckRecord> records;
    Json metrics = Json::object();
    std::optional<std::string> error;
    std::optional<std::string> error_kind;

    bool pass() const {
        if (error) return false;
        for (const auto& r : records)
            if (!r.pass) return false;
        return true;
    }
    void add(CheckRecord r) { records.push_back(std::move(r)); }
};

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/** @brief Structured outcome of one suite run. */
struct ExperimentReport {
    std::string suite;
    Json descriptor = Json::object();
    std::vector<StageReport> stages;
    std::vector<Table> tables;
    std::optional<std::string> failed_stage;
    double wall_seconds = 0.0;
    std::string timestamp;

    bool pass() const {
        if (failed_stage) return false;
        for (const auto& s : stages)
            if (!s.pass()) return false;
        return true;
    }

    const StageReport* stage(const std::string& name) const {
        for (const auto& s : stages)
            if (s.name == name) return &s;
        return nullptr;
    }

    const CheckRecord* record(const std::string& stage_name, const std::string& rec) const {
        if (const auto* s = stage(stage_name))
            for (const auto& r : s->records)
                if (r.name == rec) return &r;
        return nullptr;
    }

    /// First stage that did not pass, if any.
    std::optional<std::string> first_failure() const {
        for (const auto& s : stages)
            if (!s.pass()) return s.name;
        return failed_stage;
    }

    /**
     * @brief Runs fn against a fresh stage; a thrown library error is recorded
     * on the stage. Returns whether the stage passed.
     */
    bool run_stage(const std::string& name, const std::function<void(StageReport&)>& fn) {
        stages.emplace_back();
        stages.back().name = name;
        StageReport& s = stages.back();
        try {
            fn(s);
        } catch (const Error& e) {
            s.error = e.what();
            s.error_kind = to_string(e.kind());
        }
        if (!s.pass() && !failed_stage) failed_stage = name;
        return s.pass();
    }

    /// Timing fields live under "timing" so reproducibility checks can drop them.
    Json to_json(bool include_timing = true) const {
        Json j;
        j["suite"] = suite;
        j["pass"] = pass();
        j["failed_stage"] = failed_stage ? Json(*failed_stage) : Json(nullptr);
        j["descriptor"] = descriptor;
        Json st = Json::array();
        for (const auto& s : stages) {
            Json js;
            js["name"] = s.name;
            js["pass"] = s.pass();
            if (s.error) {
                js["error"] = *s.error;
                js["error_kind"] = *s.error_kind;
            }
            Json recs = Json::array();
            for (const auto& r : s.records) {
                Json jr;
                jr["name"] = r.name;
                jr["measured"] = finite_or_null(r.measured);
                jr["relation"] = r.relation;
                jr["target"] = finite_or_null(r.target);
                jr["tolerance"] = r.tolerance;
                jr["pass"] = r.pass;
                recs.push_back(jr);
            }
            js["records"] = recs;
            js["metrics"] = s.metrics;
            st.push_back(js);
        }
        j["stages"] = st;
        Json tabs = Json::array();
        for (const auto& t : tables) tabs.push_back(t.name + ".csv");
        j["tables"] = tabs;
        if (include_timing) j["timing"] = {{"timestamp", timestamp}, {"wall_seconds", wall_seconds}};
        return j;
    }
};

}  // namespace tubeh
