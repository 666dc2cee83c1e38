#pragma once

// Single-layer functional-link network over the shifted Legendre basis:
//
//   C(eta) = sum_i w_i L_{i-1}(eta),   N(eta) = act(C(eta))
//
// forward() returns N and its first two eta-derivatives; weight_gradients()
// returns d/dw_j of each of those three quantities.

#include "errors.hpp"
#include "legendre_basis.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slnn {

enum class Activation { Tanh, Identity };

inline std::string_view to_string(Activation a) {
    return a == Activation::Tanh ? "tanh" : "identity";
}

inline std::optional<Activation> parse_activation(std::string_view s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "identity") return Activation::Identity;
    return std::nullopt;
}

struct NetworkParams {
    std::vector<double> weights;
    Activation activation = Activation::Tanh;

    std::size_t size() const noexcept { return weights.size(); }
    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

struct NetOutput {
    double n = 0.0;
    double dn = 0.0;
    double d2n = 0.0;
};

struct NetWeightGrads {
    std::vector<double> dn_dw;
    std::vector<double> ddn_dw;
    std::vector<double> dd2n_dw;
};

namespace detail {

// act and its first three derivatives at C.
struct ActivationJet {
    double f, f1, f2, f3;
};

inline ActivationJet activation_jet(Activation kind, double c) {
    if (kind == Activation::Identity) return {c, 1.0, 0.0, 0.0};
    const double t = std::tanh(c);
    const double s = 1.0 - t * t;
    return {t, s, -2.0 * t * s, -2.0 * s * (1.0 - 3.0 * t * t)};
}

inline void check_dims(const NetworkParams& params, const BasisEval& basis) {
    if (params.weights.empty()) throw DimensionError("network has no weights");
    if (params.weights.size() != basis.size())
        throw DimensionError("weights length " + std::to_string(params.weights.size()) +
                             " does not match basis order " + std::to_string(basis.size()));
}

// C, C', C'' at the basis point.
struct LinearSum {
    double c = 0.0, c1 = 0.0, c2 = 0.0;
};

inline LinearSum linear_sum(const NetworkParams& params, const BasisEval& basis) {
    LinearSum s;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        s.c += params.weights[i] * basis.values[i];
        s.c1 += params.weights[i] * basis.d1[i];
        s.c2 += params.weights[i] * basis.d2[i];
    }
    return s;
}

} // namespace detail

inline NetOutput forward(const NetworkParams& params, const BasisEval& basis) {
    detail::check_dims(params, basis);
    const auto s = detail::linear_sum(params, basis);
    const auto a = detail::activation_jet(params.activation, s.c);
    return {a.f, a.f1 * s.c1, a.f2 * s.c1 * s.c1 + a.f1 * s.c2};
}

inline NetWeightGrads weight_gradients(const NetworkParams& params, const BasisEval& basis) {
    detail::check_dims(params, basis);
    const auto s = detail::linear_sum(params, basis);
    const auto a = detail::activation_jet(params.activation, s.c);
    const std::size_t m = params.weights.size();

    NetWeightGrads g;
    g.dn_dw.resize(m);
    g.ddn_dw.resize(m);
    g.dd2n_dw.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double l = basis.values[j];
        const double l1 = basis.d1[j];
        const double l2 = basis.d2[j];
        g.dn_dw[j] = a.f1 * l;
        g.ddn_dw[j] = a.f2 * l * s.c1 + a.f1 * l1;
        g.dd2n_dw[j] = a.f3 * l * s.c1 * s.c1 + 2.0 * a.f2 * s.c1 * l1 + a.f2 * l * s.c2 + a.f1 * l2;
    }
    return g;
}

} // namespace slnn
