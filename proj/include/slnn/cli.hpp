#pragma once

// Command-line front end. `run` takes the argument list without the program
// name and writes to the given streams, so it can be driven in-process.
//
// Exit status: 0 success, 1 not converged / check failed, 2 usage or input
// error (no files written), 3 numeric divergence.

#include "errors.hpp"
#include "legendre_basis.hpp"
#include "problem.hpp"
#include "report.hpp"
#include "training.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace slnn::cli {

enum ExitCode : int { kOk = 0, kNotConverged = 1, kUsage = 2, kDiverged = 3 };

namespace detail {

inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << contents;
}

// Output paths are checked up front so a bad path fails before any work.
inline void check_writable(const std::string& flag, const std::string& path) {
    if (path.empty()) return;
    const auto parent = std::filesystem::absolute(path).parent_path();
    if (!std::filesystem::is_directory(parent))
        throw UsageError(flag + ": directory '" + parent.string() + "' does not exist");
    if (std::filesystem::is_directory(path)) throw UsageError(flag + ": '" + path + "' is a directory");
}

/// A built-in name or a path to a problem document.
inline ProblemSpec resolve_problem(const std::string& ref) {
    for (const auto& n : builtin_names())
        if (ref == n) return builtin(ref);
    if (std::filesystem::is_regular_file(ref)) {
        try {
            return load_problem(read_file(ref));
        } catch (const SchemaError& e) {
            throw UsageError("--problem: " + ref + ": " + e.what());
        }
    }
    std::string msg = "--problem: '" + ref + "' is neither a built-in nor a readable file; built-ins:";
    for (const auto& n : builtin_names()) msg += " " + n;
    throw UsageError(msg);
}

const std::map<std::string, Activation> kActivations = {{"tanh", Activation::Tanh},
                                                         {"identity", Activation::Identity}};
const std::map<std::string, ReportFormat> kFormats = {{"csv", ReportFormat::Csv}, {"json", ReportFormat::Json}};
const std::map<std::string, Precision> kPrecisions = {{"full", Precision::Full}, {"paper", Precision::Table}};

// Enum flags are held as validated strings and looked up after parsing.
template <class Map>
CLI::IsMember member_of(const Map& m) {
    std::vector<std::string> keys;
    for (const auto& [k, _] : m) keys.push_back(k);
    return CLI::IsMember(keys, CLI::ignore_case);
}

// Shared training flags for solve.
struct SolveOptions {
    std::string problem;
    std::size_t order = 5;
    std::size_t train_points = 10;
    std::string activation = "tanh";
    double lr = 0.01;
    std::size_t max_iters = 50000;
    double tol = 1e-12;
    std::uint64_t seed = 0;
    double init_range = 0.5;
    bool no_backtracking = false;
    double stall_tol = 1e-2;
    std::size_t test_points = 19;
    std::string out;
    std::string format = "csv";
    std::string loss_history;
    std::string precision = "full";
};

struct GradcheckOptions {
    std::string problem = "example1";
    std::size_t order = 5;
    std::size_t train_points = 10;
    std::string activation = "tanh";
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    double tolerance = 1e-6;
    double step = 1e-6;
    double weight_range = 1.0;
};

struct BasisOptions {
    std::size_t order = 5;
    std::size_t points = 11;
    bool derivatives = false;
    bool check_orthogonality = false;
    std::size_t quadrature_points = 64;
    std::string out;
};

struct TableOptions {
    std::string in;
    std::string precision = "paper";
};

inline const auto kOrderRange = CLI::Range(std::size_t{1}, kDefaultMaxOrder);

inline void add_solve(CLI::App& app, SolveOptions& o) {
    auto* s = app.add_subcommand("solve", "Train the network on a problem and report test-grid errors");
    s->add_option("--problem", o.problem, "Built-in name (example1, example2) or problem JSON path")->required();
    s->add_option("--order", o.order, "Number of shifted Legendre basis functions m")->check(kOrderRange)
        ->capture_default_str();
    s->add_option("--train-points", o.train_points, "Collocation points h")->check(CLI::Range(std::size_t{2},
                                                                                                std::size_t{1000000}))
        ->capture_default_str();
    s->add_option("--activation", o.activation, "tanh | identity")
        ->check(member_of(kActivations))
        ->default_str("tanh");
    s->add_option("--lr", o.lr, "Learning rate rho")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--max-iters", o.max_iters, "Maximum accepted gradient steps")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}))
        ->capture_default_str();
    s->add_option("--tol", o.tol, "Stop when the loss drops to this value")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    s->add_option("--seed", o.seed, "Seed for weight initialization")->capture_default_str();
    s->add_option("--init-range", o.init_range, "Initial weights uniform in [-r, r]")->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_flag("--no-backtracking", o.no_backtracking, "Take every step at the fixed rate");
    s->add_option("--stall-tol", o.stall_tol,
                  "Plateau stop: relative loss decrease over 1000 steps at or below this value (0 disables)")
        ->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
    s->add_option("--test-points", o.test_points, "Test grid size k")->check(CLI::Range(std::size_t{1},
                                                                                         std::size_t{1000000}))
        ->capture_default_str();
    s->add_option("--out", o.out, "Write the error report here");
    s->add_option("--format", o.format, "Report format: csv | json")
        ->check(member_of(kFormats))
        ->default_str("csv");
    s->add_option("--loss-history", o.loss_history, "Write iter,loss CSV here");
    s->add_option("--precision", o.precision, "CSV number format: full | paper (4 decimals)")
        ->check(member_of(kPrecisions))
        ->default_str("full");
}

inline void add_gradcheck(CLI::App& app, GradcheckOptions& o) {
    auto* s = app.add_subcommand("gradcheck", "Compare the analytic loss gradient with central differences");
    s->add_option("--problem", o.problem, "Built-in name or problem JSON path")->capture_default_str();
    s->add_option("--order", o.order, "Number of basis functions m")->check(kOrderRange)->capture_default_str();
    s->add_option("--train-points", o.train_points, "Collocation points h")->check(CLI::Range(std::size_t{2},
                                                                                                std::size_t{1000000}))
        ->capture_default_str();
    s->add_option("--activation", o.activation, "tanh | identity")
        ->check(member_of(kActivations))
        ->default_str("tanh");
    s->add_option("--trials", o.trials, "Random weight vectors to test")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
        ->capture_default_str();
    s->add_option("--seed", o.seed, "Seed for the random weight vectors")->capture_default_str();
    s->add_option("--tolerance", o.tolerance, "Pass iff worst discrepancy is below this")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    s->add_option("--step", o.step, "Central-difference step")->check(CLI::Range(1e-300, 1e-3))
        ->capture_default_str();
    s->add_option("--weight-range", o.weight_range, "Weights uniform in [-r, r]")->check(CLI::PositiveNumber)
        ->capture_default_str();
}

inline void add_basis(CLI::App& app, BasisOptions& o) {
    auto* s = app.add_subcommand("basis", "Tabulate shifted Legendre polynomials on [0, 1]");
    s->add_option("--order", o.order, "Number of basis functions m")->check(kOrderRange)->capture_default_str();
    s->add_option("--points", o.points, "Equally spaced points including 0 and 1")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
        ->capture_default_str();
    s->add_flag("--derivatives", o.derivatives, "Also write first and second derivatives");
    s->add_flag("--check-orthogonality", o.check_orthogonality,
                "Print the orthogonality defect; exit 0 iff it is <= 1e-12");
    s->add_option("--quadrature-points", o.quadrature_points, "Gauss-Legendre nodes for the orthogonality check")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
        ->capture_default_str();
    s->add_option("--out", o.out, "Write the CSV here instead of standard output");
}

inline void add_table(CLI::App& app, TableOptions& o) {
    auto* s = app.add_subcommand("table", "Print a report CSV as an aligned error table with a summary");
    s->add_option("--in", o.in, "Report CSV written by solve")->required();
    s->add_option("--precision", o.precision, "full | paper (4 decimals)")
        ->check(member_of(kPrecisions))
        ->default_str("paper");
}

inline int run_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
    TrainConfig config;
    config.order = BasisOrder(o.order);
    config.activation = kActivations.at(o.activation);
    config.train_points = o.train_points;
    config.learning_rate = o.lr;
    config.max_iters = o.max_iters;
    config.loss_tol = o.tol;
    config.seed = o.seed;
    config.init_range = o.init_range;
    config.backtracking = !o.no_backtracking;
    config.stall_tol = o.stall_tol;

    const ProblemSpec problem = resolve_problem(o.problem);
    try {
        config.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    check_writable("--out", o.out);
    check_writable("--loss-history", o.loss_history);

    TrainReport report;
    try {
        report = train(problem, config);
    } catch (const DivergenceError& e) {
        err << "error: training diverged at iteration " << e.iteration() << ": " << e.what()
            << " (last finite loss " << sci(e.last_loss()) << ")\n";
        return kDiverged;
    }

    ErrorTable table = evaluate(report.final_params, problem.conditions(), problem, test_grid(problem, o.test_points));
    table.config_echo = config;
    table.training = report;

    std::string max_err = "n/a";
    try {
        max_err = sci(summarize(table).max_abs_error);
    } catch (const NotComputable&) {
    }

    if (!o.out.empty()) write_file(o.out, emit(table, kFormats.at(o.format), kPrecisions.at(o.precision)));
    if (!o.loss_history.empty()) write_file(o.loss_history, emit_loss_history(report.loss_history));

    out << "problem=" << problem.name() << " converged=" << (report.converged ? "true" : "false")
        << " iters=" << report.iterations << " final_loss=" << sci(report.final_loss()) << " max_err=" << max_err
        << "\n";
    return report.converged ? kOk : kNotConverged;
}

inline int run_gradcheck(const GradcheckOptions& o, std::ostream& out) {
    const ProblemSpec problem = resolve_problem(o.problem);
    const auto r = gradcheck(problem, kActivations.at(o.activation), BasisOrder(o.order), o.train_points, o.trials, o.seed, o.step,
                             o.weight_range);
    const bool pass = r.worst < o.tolerance;
    out << "problem=" << problem.name() << " activation=" << o.activation << " trials=" << r.trials
        << " worst_relative_discrepancy=" << sci(r.worst) << " worst_trial=" << r.worst_trial
        << " tolerance=" << sci(o.tolerance) << " " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kOk : kNotConverged;
}

inline int run_basis(const BasisOptions& o, std::ostream& out) {
    const BasisOrder order(o.order);
    if (o.check_orthogonality && o.quadrature_points < 2 * o.order)
        throw UsageError("--quadrature-points must be >= 2 * --order");
    check_writable("--out", o.out);

    int status = kOk;
    if (o.check_orthogonality) {
        const double defect = orthogonality_defect(order, o.quadrature_points);
        out << "orthogonality_defect=" << sci(defect) << "\n";
        status = defect <= 1e-12 ? kOk : kNotConverged;
        if (o.out.empty()) return status;
    }

    std::string csv = "eta";
    for (std::size_t k = 0; k < o.order; ++k) {
        csv += ",L" + std::to_string(k);
        if (o.derivatives) csv += ",dL" + std::to_string(k) + ",d2L" + std::to_string(k);
    }
    csv += "\n";
    for (std::size_t i = 0; i < o.points; ++i) {
        const double eta = i + 1 == o.points ? 1.0 : static_cast<double>(i) / static_cast<double>(o.points - 1);
        const BasisEval b = eval_basis(order, eta);
        csv += slnn::detail::format_full(eta);
        for (std::size_t k = 0; k < o.order; ++k) {
            csv += "," + slnn::detail::format_full(b.values[k]);
            if (o.derivatives)
                csv += "," + slnn::detail::format_full(b.d1[k]) + "," + slnn::detail::format_full(b.d2[k]);
        }
        csv += "\n";
    }
    if (o.out.empty()) out << csv;
    else write_file(o.out, csv);
    return status;
}

inline int run_table(const TableOptions& o, std::ostream& out) {
    std::vector<ErrorRow> rows;
    try {
        rows = parse_report_csv(read_file(o.in));
    } catch (const SchemaError& e) {
        throw UsageError("--in: " + o.in + ": " + e.what());
    }
    const bool fixed = o.precision == "paper";
    auto num = [&](double v) { return fixed ? slnn::detail::format_fixed4(v) : slnn::detail::format_full(v); };
    auto errnum = [&](double v) {
        return fixed ? slnn::detail::format_table_error(v) : slnn::detail::format_full(v);
    };
    const int w = fixed ? 16 : 26;
    out << std::left << std::setw(w) << "eta" << std::setw(w) << "Exact Solution" << std::setw(w)
        << "SLNN Solution" << "Error\n";
    for (const auto& r : rows) {
        out << std::setw(w) << num(r.eta) << std::setw(w) << (r.exact ? num(*r.exact) : "-") << std::setw(w)
            << num(r.approx) << (r.abs_error ? errnum(*r.abs_error) : "-") << "\n";
    }
    ErrorTable table;
    table.rows = std::move(rows);
    try {
        const Summary s = summarize(table);
        out << "max_abs_error=" << sci(s.max_abs_error) << " rmse=" << sci(s.rmse) << " n=" << s.n_points << "\n";
    } catch (const NotComputable&) {
        out << "no exact values; summary not computable\n";
    }
    return kOk;
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shifted Legendre neural network solver for Lane-Emden type singular IVPs", "slnn"};
    app.require_subcommand(1);
    detail::SolveOptions solve;
    detail::GradcheckOptions grad;
    detail::BasisOptions basis;
    detail::TableOptions table;
    detail::add_solve(app, solve);
    detail::add_gradcheck(app, grad);
    detail::add_basis(app, basis);
    detail::add_table(app, table);

    std::vector<const char*> argv{"slnn"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (app.got_subcommand("solve")) return detail::run_solve(solve, out, err);
        if (app.got_subcommand("gradcheck")) return detail::run_gradcheck(grad, out);
        if (app.got_subcommand("basis")) return detail::run_basis(basis, out);
        return detail::run_table(table, out);
    } catch (const detail::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kDiverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

} // namespace slnn::cli
