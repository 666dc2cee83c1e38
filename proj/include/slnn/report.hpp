#pragma once

// Test-grid evaluation of a trained network and its serialized reports.
//
// CSV: header `eta,exact,slnn,abs_error`, one LF-terminated row per point,
// numbers as %.17g (round-trip exact), missing values left empty.
// JSON: {"problem", "config", "training", "summary", "rows"} in that order.

#include "errors.hpp"
#include "problem.hpp"
#include "training.hpp"
#include "trial_solution.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace slnn {

struct ErrorRow {
    double eta = 0.0;
    std::optional<double> exact;
    double approx = 0.0;
    std::optional<double> abs_error;

    friend bool operator==(const ErrorRow&, const ErrorRow&) = default;
};

struct ErrorTable {
    std::string problem_name;
    std::vector<ErrorRow> rows;
    std::optional<TrainConfig> config_echo;
    std::optional<TrainReport> training;
};

struct Summary {
    double max_abs_error = 0.0;
    double rmse = 0.0;
    std::size_t n_points = 0;
};

enum class ReportFormat { Csv, Json };
enum class Precision { Full, Table };

/// k points a + i (b - a)/k, i = 1..k. k = 19 on [0,1] gives the classic
/// 0.0526, 0.1053, ..., 1 layout.
inline std::vector<double> test_grid(const ProblemSpec& problem, std::size_t k) {
    if (k < 1) throw InvalidArgument("test grid needs k >= 1 points");
    const auto [a, b] = problem.domain();
    std::vector<double> grid(k);
    for (std::size_t i = 1; i <= k; ++i) grid[i - 1] = a + static_cast<double>(i) * (b - a) / static_cast<double>(k);
    grid.back() = b;
    return grid;
}

inline ErrorTable evaluate(const NetworkParams& model, const IVPConditions& conds, const ProblemSpec& problem,
                           const std::vector<double>& grid) {
    const auto [a, b] = problem.domain();
    ErrorTable table;
    table.problem_name = problem.name();
    table.rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double eta = grid[i];
        if (!(eta > a && eta <= b))
            throw DomainError("test point " + std::to_string(i) + " = " + std::to_string(eta) +
                              " outside (a, b]");
        if (i > 0 && !(eta > grid[i - 1])) throw InvalidArgument("test grid must be strictly increasing");
        ErrorRow row;
        row.eta = eta;
        row.approx = trial_value(conds, model, eta);
        row.exact = exact_value(problem, eta);
        if (row.exact) row.abs_error = std::abs(*row.exact - row.approx);
        table.rows.push_back(row);
    }
    return table;
}

inline Summary summarize(const ErrorTable& table) {
    Summary s;
    double sum_sq = 0.0;
    for (const auto& row : table.rows) {
        if (!row.abs_error) continue;
        s.max_abs_error = std::max(s.max_abs_error, *row.abs_error);
        sum_sq += *row.abs_error * *row.abs_error;
        ++s.n_points;
    }
    if (s.n_points == 0) throw NotComputable("no exact values available; error summary is not computable");
    s.rmse = std::sqrt(sum_sq / static_cast<double>(s.n_points));
    return s;
}

namespace detail {

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_fixed4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// Errors below 1e-3 switch to scientific notation, e.g. 7.6036E-05.
inline std::string format_table_error(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, v != 0.0 && std::abs(v) < 1e-3 ? "%.4E" : "%.4f", v);
    return buf;
}

inline nlohmann::ordered_json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace detail

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
    nlohmann::ordered_json j;
    j["order"] = c.order.value();
    j["activation"] = std::string(to_string(c.activation));
    j["train_points"] = c.train_points;
    j["learning_rate"] = c.learning_rate;
    j["max_iters"] = c.max_iters;
    j["loss_tol"] = c.loss_tol;
    j["seed"] = c.seed;
    j["init_range"] = c.init_range;
    j["backtracking"] = c.backtracking;
    j["stall_tol"] = c.stall_tol;
    j["stall_window"] = c.stall_window;
    j["rng"] = std::string(kRngName);
    return j;
}

inline std::string emit_csv(const ErrorTable& table, Precision precision = Precision::Full) {
    const bool fixed = precision == Precision::Table;
    std::string out = "eta,exact,slnn,abs_error\n";
    for (const auto& row : table.rows) {
        auto num = [&](double v) { return fixed ? detail::format_fixed4(v) : detail::format_full(v); };
        out += num(row.eta);
        out += ',';
        if (row.exact) out += num(*row.exact);
        out += ',';
        out += num(row.approx);
        out += ',';
        if (row.abs_error) out += fixed ? detail::format_table_error(*row.abs_error) : detail::format_full(*row.abs_error);
        out += '\n';
    }
    return out;
}

inline std::string emit_json(const ErrorTable& table) {
    nlohmann::ordered_json j;
    j["problem"] = table.problem_name;
    j["config"] = table.config_echo ? to_json(*table.config_echo) : nlohmann::ordered_json(nullptr);
    if (table.training) {
        const auto& t = *table.training;
        nlohmann::ordered_json tj;
        tj["iterations"] = t.iterations;
        tj["converged"] = t.converged;
        tj["stop_reason"] = std::string(to_string(t.stop_reason));
        tj["final_loss"] = t.final_loss();
        tj["weights"] = t.final_params.weights;
        tj["train_grid"] = t.grid;
        tj["seed_used"] = t.seed_used;
        j["training"] = std::move(tj);
    } else {
        j["training"] = nullptr;
    }
    try {
        const Summary s = summarize(table);
        j["summary"] = {{"max_abs_error", s.max_abs_error}, {"rmse", s.rmse}, {"n_points", s.n_points}};
    } catch (const NotComputable&) {
        j["summary"] = nullptr;
    }
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r;
        r["eta"] = row.eta;
        r["exact"] = detail::optional_number(row.exact);
        r["slnn"] = row.approx;
        r["abs_error"] = detail::optional_number(row.abs_error);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

inline std::string emit(const ErrorTable& table, ReportFormat format, Precision precision = Precision::Full) {
    return format == ReportFormat::Csv ? emit_csv(table, precision) : emit_json(table);
}

/// Rows of a report CSV as written by emit_csv.
inline std::vector<ErrorRow> parse_report_csv(std::string_view text) {
    std::vector<ErrorRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "eta,exact,slnn,abs_error")
        throw SchemaError("header", "expected 'eta,exact,slnn,abs_error'");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        const std::string where = "line " + std::to_string(lineno);
        if (fields.size() != 4) throw SchemaError(where, "expected 4 fields");
        auto number = [&](const std::string& f) {
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (f.empty() || end != f.c_str() + f.size()) throw SchemaError(where, "malformed number '" + f + "'");
            return v;
        };
        auto optional = [&](const std::string& f) { return f.empty() ? std::nullopt : std::optional(number(f)); };
        rows.push_back({number(fields[0]), optional(fields[1]), number(fields[2]), optional(fields[3])});
    }
    return rows;
}

inline std::string emit_loss_history(const std::vector<double>& history) {
    std::string out = "iter,loss\n";
    for (std::size_t i = 0; i < history.size(); ++i) out += std::to_string(i) + "," + detail::format_full(history[i]) + "\n";
    return out;
}

} // namespace slnn
