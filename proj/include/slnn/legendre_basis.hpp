#pragma once

// Shifted Legendre polynomials L_k(eta) = P_k(2 eta - 1) on [0,1], with first
// and second derivatives.
//
// The three-term recurrence used everywhere in this file is
//
//   (k+1) L_{k+1}(eta) = (2k+1) (2 eta - 1) L_k(eta) - k L_{k-1}(eta)
//
// Some texts print the left-hand side as (k+1) P_k(x), which cannot be right
// (P_k appears on both sides with different coefficients); the index is k+1.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace slnn {

inline constexpr std::size_t kDefaultMaxOrder = 64;

/// Number of basis functions m (indices 0..m-1).
class BasisOrder {
public:
    explicit BasisOrder(std::size_t m, std::size_t ceiling = kDefaultMaxOrder) : m_(m) {
        if (m == 0) throw InvalidArgument("basis order must be >= 1");
        if (m > ceiling)
            throw InvalidArgument("basis order " + std::to_string(m) + " exceeds ceiling " +
                                  std::to_string(ceiling));
    }

    std::size_t value() const noexcept { return m_; }
    friend bool operator==(BasisOrder, BasisOrder) = default;

private:
    std::size_t m_;
};

template <std::floating_point T>
struct BasicBasisEval {
    T eta{};
    std::vector<T> values;
    std::vector<T> d1;
    std::vector<T> d2;

    std::size_t size() const noexcept { return values.size(); }
    friend bool operator==(const BasicBasisEval&, const BasicBasisEval&) = default;
};

using BasisEval = BasicBasisEval<double>;

namespace detail {

template <std::floating_point T>
void check_unit_interval(T eta, const std::string& what) {
    if (!(eta >= T(0) && eta <= T(1)))
        throw DomainError(what + " = " + std::to_string(static_cast<double>(eta)) + " outside [0, 1]");
}

} // namespace detail

/// Values, d/deta and d2/deta2 of L_0..L_{m-1} at one point, in a single
/// forward sweep of the recurrence and its two derivatives.
template <std::floating_point T = double>
BasicBasisEval<T> eval_basis(BasisOrder order, T eta) {
    detail::check_unit_interval(eta, "eta");
    const std::size_t m = order.value();

    BasicBasisEval<T> out;
    out.eta = eta;
    out.values.assign(m, T(0));
    out.d1.assign(m, T(0));
    out.d2.assign(m, T(0));

    out.values[0] = T(1);
    if (m == 1) return out;

    const T x = T(2) * eta - T(1);
    out.values[1] = x;
    out.d1[1] = T(2);

    for (std::size_t k = 1; k + 1 < m; ++k) {
        const T a = T(2 * k + 1);
        const T b = T(k);
        const T c = T(k + 1);
        // d/deta (2 eta - 1) = 2
        out.values[k + 1] = (a * x * out.values[k] - b * out.values[k - 1]) / c;
        out.d1[k + 1] = (a * (T(2) * out.values[k] + x * out.d1[k]) - b * out.d1[k - 1]) / c;
        out.d2[k + 1] = (a * (T(4) * out.d1[k] + x * out.d2[k]) - b * out.d2[k - 1]) / c;
    }
    return out;
}

/// eval_basis at every grid point, results in input order.
template <std::floating_point T = double>
std::vector<BasicBasisEval<T>> eval_basis_grid(BasisOrder order, std::span<const T> grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= T(0) && grid[i] <= T(1)))
            throw DomainError("grid[" + std::to_string(i) + "] = " + std::to_string(static_cast<double>(grid[i])) +
                              " outside [0, 1]");
    }
    std::vector<BasicBasisEval<T>> out;
    out.reserve(grid.size());
    for (T eta : grid) out.push_back(eval_basis<T>(order, eta));
    return out;
}

inline std::vector<BasisEval> eval_basis_grid(BasisOrder order, const std::vector<double>& grid) {
    return eval_basis_grid<double>(order, std::span<const double>(grid));
}

namespace detail {

// P_n(x) and P_n'(x) for |x| < 1.
inline std::pair<double, double> legendre_with_derivative(std::size_t n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return {1.0, 0.0};
    for (std::size_t k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return {p1, static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0)};
}

} // namespace detail

/// Gauss-Legendre rule on [0,1]: n nodes (ascending) and weights, exact for
/// polynomials of degree <= 2n-1. Roots of P_n found by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(std::size_t n) {
    if (n == 0) throw InvalidArgument("quadrature needs at least one node");
    std::vector<double> nodes(n), weights(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [pn, dp] = detail::legendre_with_derivative(n, x);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = detail::legendre_with_derivative(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root of P_n; roots are symmetric about 0
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[n - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    return {std::move(nodes), std::move(weights)};
}

/// max_{j,k<m} | int_0^1 L_j L_k - delta_jk/(2j+1) |, by Gauss-Legendre
/// quadrature. Requires quadrature_points >= 2m.
inline double orthogonality_defect(BasisOrder order, std::size_t quadrature_points) {
    const std::size_t m = order.value();
    if (quadrature_points < 2 * m)
        throw InvalidArgument("orthogonality check needs >= " + std::to_string(2 * m) + " quadrature points, got " +
                              std::to_string(quadrature_points));

    const auto [nodes, weights] = gauss_legendre_unit(quadrature_points);
    std::vector<double> gram(m * m, 0.0);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        const auto b = eval_basis(order, nodes[q]);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) gram[j * m + k] += weights[q] * b.values[j] * b.values[k];
    }
    double defect = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            const double expected = j == k ? 1.0 / (2.0 * static_cast<double>(j) + 1.0) : 0.0;
            defect = std::max(defect, std::abs(gram[j * m + k] - expected));
        }
    }
    return defect;
}

} // namespace slnn
