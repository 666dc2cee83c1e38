#pragma once

// Trial solution that satisfies xi(a) = g0, xi'(a) = g1 for every weight vector:
//
//   xi_t(eta) = g0 + g1 (eta - a) + (eta - a)^2 N(eta)

#include "errors.hpp"
#include "flnn.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace slnn {

struct IVPConditions {
    double a = 0.0;
    double g0 = 0.0;
    double g1 = 0.0;

    friend bool operator==(const IVPConditions&, const IVPConditions&) = default;
};

struct TrialEval {
    double xi = 0.0;
    double dxi = 0.0;
    double d2xi = 0.0;
    std::vector<double> xi_dw;
    std::vector<double> dxi_dw;
    std::vector<double> d2xi_dw;
};

namespace detail {

struct Jet {
    double v, d1, d2;
};

// (eta-a)^2 * N and its two eta-derivatives. Linear in (n, dn, d2n), so the
// same map carries network values and their weight gradients.
inline Jet embed(double t, double n, double dn, double d2n) {
    return {t * t * n, 2.0 * t * n + t * t * dn, 2.0 * n + 4.0 * t * dn + t * t * d2n};
}

} // namespace detail

/// Values and weight gradients of the trial solution at `eta`. `basis` must be
/// evaluated at the same eta.
inline TrialEval trial_eval(const IVPConditions& conds, const NetworkParams& params, const BasisEval& basis,
                            double eta) {
    if (eta < conds.a) throw DomainError("eta = " + std::to_string(eta) + " precedes initial point a");
    if (basis.eta != eta) throw InvalidArgument("basis evaluated at a different point than eta");
    const double t = eta - conds.a;

    const NetOutput out = forward(params, basis);
    const NetWeightGrads grads = weight_gradients(params, basis);

    const auto base = detail::embed(t, out.n, out.dn, out.d2n);
    TrialEval r;
    r.xi = conds.g0 + conds.g1 * t + base.v;
    r.dxi = conds.g1 + base.d1;
    r.d2xi = base.d2;

    const std::size_t m = params.size();
    r.xi_dw.resize(m);
    r.dxi_dw.resize(m);
    r.d2xi_dw.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto gj = detail::embed(t, grads.dn_dw[j], grads.ddn_dw[j], grads.dd2n_dw[j]);
        r.xi_dw[j] = gj.v;
        r.dxi_dw[j] = gj.d1;
        r.d2xi_dw[j] = gj.d2;
    }
    return r;
}

/// Value only, for evaluation on test grids.
inline double trial_value(const IVPConditions& conds, const NetworkParams& params, double eta) {
    const auto basis = eval_basis(BasisOrder(params.size()), eta);
    const double t = eta - conds.a;
    return conds.g0 + conds.g1 * t + t * t * forward(params, basis).n;
}

} // namespace slnn
