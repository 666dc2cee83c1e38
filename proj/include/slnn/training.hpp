#pragma once

// Collocation loss, its analytic weight gradient, and gradient-descent training.
//
//   E(w) = sum_i 1/2 r_i(w)^2,   r_i = xi_t''(eta_i) - F(eta_i, xi_t, xi_t')
//   dE/dw_j = sum_i r_i (d xi_t''/dw_j - dF/dxi * d xi_t/dw_j - dF/dxi' * d xi_t'/dw_j)
//   w <- w - rho dE/dw
//
// Reproducibility: initial weights come from std::mt19937_64 (fully specified
// by the C++ standard) mapped to [0,1) by taking the top 53 bits, so a seed
// yields the same weights on every conforming platform.

#include "errors.hpp"
#include "flnn.hpp"
#include "legendre_basis.hpp"
#include "problem.hpp"
#include "trial_solution.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace slnn {

inline constexpr std::string_view kRngName = "mt19937_64";

struct TrainConfig {
    BasisOrder order{5};
    Activation activation = Activation::Tanh;
    std::size_t train_points = 10;
    double learning_rate = 0.01;
    std::size_t max_iters = 50000;
    double loss_tol = 1e-12;
    std::uint64_t seed = 0;
    double init_range = 0.5;
    bool backtracking = true;
    // Plateau stop: converged once the loss improved by at most a fraction
    // `stall_tol` over the last `stall_window` accepted steps. 0 disables.
    double stall_tol = 1e-2;
    std::size_t stall_window = 1000;

    void validate() const {
        if (train_points < 2) throw InvalidArgument("train_points must be >= 2");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
            throw InvalidArgument("learning_rate must be a positive finite number");
        if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
        if (!(loss_tol >= 0.0)) throw InvalidArgument("loss_tol must be >= 0");
        if (!(init_range > 0.0) || !std::isfinite(init_range))
            throw InvalidArgument("init_range must be a positive finite number");
        if (!(stall_tol >= 0.0) || stall_tol >= 1.0) throw InvalidArgument("stall_tol must be in [0, 1)");
        if (stall_window < 1) throw InvalidArgument("stall_window must be >= 1");
    }
};

enum class StopReason { LossTolerance, Plateau, MaxIterations, NoDescent };

inline std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::LossTolerance: return "loss_tolerance";
    case StopReason::Plateau: return "plateau";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::NoDescent: return "no_descent";
    }
    return "?";
}

struct TrainReport {
    NetworkParams final_params;
    std::vector<double> loss_history; // initial loss, then one entry per accepted step
    std::size_t iterations = 0;
    bool converged = false;
    StopReason stop_reason = StopReason::MaxIterations;
    std::vector<double> grid;
    std::uint64_t seed_used = 0;

    double final_loss() const { return loss_history.back(); }
};

/// h equidistant points a + i (b - a)/h, i = 1..h. The left endpoint is never
/// a collocation point; the right one always is.
inline std::vector<double> make_grid(const ProblemSpec& problem, std::size_t h) {
    if (h < 2) throw InvalidArgument("collocation grid needs h >= 2 points");
    const auto [a, b] = problem.domain();
    std::vector<double> grid(h);
    for (std::size_t i = 1; i <= h; ++i) grid[i - 1] = a + static_cast<double>(i) * (b - a) / static_cast<double>(h);
    grid.back() = b;
    return grid;
}

/// Basis evaluations cached over a fixed grid. Used by every loss/gradient
/// entry point so values agree bitwise between them.
class Collocation {
public:
    Collocation(const ProblemSpec& problem, const IVPConditions& conds, std::vector<double> grid, BasisOrder order)
        : problem_(&problem), conds_(conds), grid_(std::move(grid)) {
        for (double eta : grid_) detail::check_residual_point(problem, eta);
        basis_ = eval_basis_grid(order, grid_);
    }

    const std::vector<double>& grid() const noexcept { return grid_; }

    double loss(const NetworkParams& params) const {
        check(params);
        double e = 0.0;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double r = point_residual(params, i).r;
            e += 0.5 * r * r;
        }
        return e;
    }

    std::vector<double> gradient(const NetworkParams& params) const {
        check(params);
        std::vector<double> g(params.size(), 0.0);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const TrialEval t = trial_eval(conds_, params, basis_[i], grid_[i]);
            const ResidualEval res = residual(*problem_, grid_[i], t);
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double dr = t.d2xi_dw[j] - res.df_dxi * t.xi_dw[j] - res.df_ddxi * t.dxi_dw[j];
                g[j] += res.r * dr;
            }
        }
        return g;
    }

private:
    void check(const NetworkParams& params) const {
        if (params.size() != basis_.front().size())
            throw DimensionError("weights length " + std::to_string(params.size()) + " does not match basis order " +
                                 std::to_string(basis_.front().size()));
    }

    ResidualEval point_residual(const NetworkParams& params, std::size_t i) const {
        const auto& b = basis_[i];
        const NetOutput out = forward(params, b);
        const double t = grid_[i] - conds_.a;
        const auto jet = detail::embed(t, out.n, out.dn, out.d2n);
        return residual(*problem_, grid_[i], conds_.g0 + conds_.g1 * t + jet.v, conds_.g1 + jet.d1, jet.d2);
    }

    const ProblemSpec* problem_;
    IVPConditions conds_;
    std::vector<double> grid_;
    std::vector<BasisEval> basis_;
};

inline double loss(const ProblemSpec& problem, const IVPConditions& conds, const NetworkParams& params,
                   const std::vector<double>& grid) {
    return Collocation(problem, conds, grid, BasisOrder(params.size())).loss(params);
}

inline std::vector<double> loss_gradient(const ProblemSpec& problem, const IVPConditions& conds,
                                         const NetworkParams& params, const std::vector<double>& grid) {
    return Collocation(problem, conds, grid, BasisOrder(params.size())).gradient(params);
}

/// Central differences of the loss in each weight.
inline std::vector<double> finite_diff_gradient(const ProblemSpec& problem, const IVPConditions& conds,
                                                const NetworkParams& params, const std::vector<double>& grid,
                                                double step) {
    if (!(step > 0.0 && step <= 1e-3)) throw InvalidArgument("finite-difference step must be in (0, 1e-3]");
    const Collocation c(problem, conds, grid, BasisOrder(params.size()));
    std::vector<double> g(params.size());
    NetworkParams probe = params;
    for (std::size_t j = 0; j < g.size(); ++j) {
        probe.weights[j] = params.weights[j] + step;
        const double up = c.loss(probe);
        probe.weights[j] = params.weights[j] - step;
        const double down = c.loss(probe);
        probe.weights[j] = params.weights[j];
        g[j] = (up - down) / (2.0 * step);
    }
    return g;
}

/// Uniform weights in [-range, range] from the documented generator.
inline std::vector<double> initial_weights(std::size_t m, double range, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> w(m);
    for (auto& x : w) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        x = range * (2.0 * u - 1.0);
    }
    return w;
}

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace detail

/// Plain gradient descent w <- w - rho grad E. With backtracking, a step that
/// raises the loss is retried at half the rate; after an accepted step the rate
/// grows by 1.5x, never beyond the configured value.
inline TrainReport train(const ProblemSpec& problem, const TrainConfig& config) {
    config.validate();
    constexpr int kMaxHalvings = 60;

    const IVPConditions conds = problem.conditions();
    const Collocation colloc(problem, conds, make_grid(problem, config.train_points), config.order);

    TrainReport report;
    report.seed_used = config.seed;
    report.grid = colloc.grid();

    NetworkParams w{initial_weights(config.order.value(), config.init_range, config.seed), config.activation};
    double e = colloc.loss(w);
    if (!std::isfinite(e)) throw DivergenceError("initial loss is not finite", 0, w.weights, e);
    report.loss_history.push_back(e);

    const double rho_max = config.learning_rate;
    double rho = rho_max;
    std::size_t k = 0;

    for (;;) {
        if (e <= config.loss_tol) {
            report.converged = true;
            report.stop_reason = StopReason::LossTolerance;
            break;
        }
        if (k >= config.max_iters) {
            report.stop_reason = StopReason::MaxIterations;
            break;
        }

        const std::vector<double> g = colloc.gradient(w);
        if (!detail::all_finite(g))
            throw DivergenceError("gradient is not finite at iteration " + std::to_string(k), k, w.weights, e);

        NetworkParams candidate = w;
        double e_new = 0.0;
        bool accepted = false;
        for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
            for (std::size_t j = 0; j < g.size(); ++j) candidate.weights[j] = w.weights[j] - rho * g[j];
            e_new = colloc.loss(candidate);
            if (!config.backtracking) {
                if (!std::isfinite(e_new) || !detail::all_finite(candidate.weights))
                    throw DivergenceError("loss is not finite at iteration " + std::to_string(k + 1), k + 1,
                                          w.weights, e);
                accepted = true;
                break;
            }
            if (std::isfinite(e_new) && e_new <= e) {
                accepted = true;
                break;
            }
            rho *= 0.5;
        }
        if (!accepted) {
            report.stop_reason = StopReason::NoDescent;
            break;
        }
        if (config.backtracking) rho = std::min(rho * 1.5, rho_max);

        w = std::move(candidate);
        e = e_new;
        ++k;
        report.loss_history.push_back(e);

        if (config.stall_tol > 0.0 && k >= config.stall_window && e > config.loss_tol) {
            const double before = report.loss_history[k - config.stall_window];
            if (before - e <= config.stall_tol * before) {
                report.converged = true;
                report.stop_reason = StopReason::Plateau;
                break;
            }
        }
    }

    report.iterations = k;
    report.final_params = std::move(w);
    return report;
}

/// max_j |a_j - b_j| / max(max_j |a_j|, floor). The floor turns the measure
/// absolute when the analytic gradient itself is tiny.
inline double gradient_discrepancy(const std::vector<double>& analytic, const std::vector<double>& numeric,
                                   double floor = 1e-9) {
    if (analytic.size() != numeric.size()) throw DimensionError("gradient lengths differ");
    double diff = 0.0, scale = floor;
    for (std::size_t j = 0; j < analytic.size(); ++j) {
        diff = std::max(diff, std::abs(analytic[j] - numeric[j]));
        scale = std::max(scale, std::abs(analytic[j]));
    }
    return diff / scale;
}

struct GradCheckResult {
    double worst = 0.0;
    std::size_t worst_trial = 0;
    std::size_t trials = 0;
};

/// Compare loss_gradient with finite_diff_gradient at `trials` weight vectors
/// drawn uniformly from [-weight_range, weight_range].
inline GradCheckResult gradcheck(const ProblemSpec& problem, Activation activation, BasisOrder order,
                                 std::size_t train_points, std::size_t trials, std::uint64_t seed,
                                 double step = 1e-6, double weight_range = 1.0) {
    if (trials < 1) throw InvalidArgument("gradcheck needs at least one trial");
    const IVPConditions conds = problem.conditions();
    const Collocation colloc(problem, conds, make_grid(problem, train_points), order);
    const std::vector<double>& grid = colloc.grid();

    std::mt19937_64 gen(seed);
    GradCheckResult result;
    result.trials = trials;
    NetworkParams params{std::vector<double>(order.value()), activation};
    for (std::size_t t = 0; t < trials; ++t) {
        for (auto& w : params.weights) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            w = weight_range * (2.0 * u - 1.0);
        }
        const double d = gradient_discrepancy(colloc.gradient(params),
                                              finite_diff_gradient(problem, conds, params, grid, step));
        if (d > result.worst || t == 0) {
            result.worst = d;
            result.worst_trial = t;
        }
    }
    return result;
}

} // namespace slnn
