#include "oracles.hpp"

#include <slnn/flnn.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace slnn;

namespace {

NetOutput forward_at(const std::vector<double>& w, Activation act, double eta) {
    return forward(NetworkParams{w, act}, eval_basis(BasisOrder(w.size()), eta));
}

} // namespace

TEST(Forward, ZeroWeightsTanh) {
    const auto out = forward_at({0, 0, 0, 0, 0}, Activation::Tanh, 0.37);
    EXPECT_EQ(out.n, 0.0);
    EXPECT_EQ(out.dn, 0.0);
    EXPECT_EQ(out.d2n, 0.0);
}

TEST(Forward, TanhOfShiftedLinear) {
    // C = 2 eta - 1 = 0.5; n = tanh(0.5), dn = 2 sech^2(0.5)
    const auto out = forward_at({0, 1}, Activation::Tanh, 0.75);
    EXPECT_NEAR(out.n, 0.46211715726000974, 1e-15);
    EXPECT_NEAR(out.dn, 1.5728954659318548, 1e-14);
}

TEST(Forward, IdentityIsLinearInBasis) {
    const double a = 0.3, b = -1.7;
    for (double eta : {0.0, 0.25, 0.9, 1.0}) {
        const auto out = forward_at({a, b}, Activation::Identity, eta);
        EXPECT_DOUBLE_EQ(out.n, a + b * (2 * eta - 1));
        EXPECT_DOUBLE_EQ(out.dn, 2 * b);
        EXPECT_EQ(out.d2n, 0.0);
    }
}

TEST(Forward, DimensionMismatch) {
    const NetworkParams p{{1.0, 2.0, 3.0}, Activation::Tanh};
    EXPECT_THROW(forward(p, eval_basis(BasisOrder(2), 0.5)), DimensionError);
    EXPECT_THROW(weight_gradients(p, eval_basis(BasisOrder(4), 0.5)), DimensionError);
}

TEST(WeightGradients, ZeroWeightsTanhGivesBasis) {
    const auto basis = eval_basis(BasisOrder(5), 0.3);
    const auto g = weight_gradients(NetworkParams{std::vector<double>(5, 0.0), Activation::Tanh}, basis);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(g.dn_dw[j], basis.values[j]);

    const auto g1 = weight_gradients(NetworkParams{std::vector<double>(5, 0.0), Activation::Tanh},
                                     eval_basis(BasisOrder(5), 1.0));
    EXPECT_EQ(g1.dn_dw, std::vector<double>(5, 1.0));
}

TEST(WeightGradients, IdentityReturnsBasisAndDerivatives) {
    oracle::Rng rng(3);
    const auto basis = eval_basis(BasisOrder(6), 0.61);
    const auto g = weight_gradients(NetworkParams{rng.vec(6, -2, 2), Activation::Identity}, basis);
    EXPECT_EQ(g.dn_dw, basis.values);
    EXPECT_EQ(g.ddn_dw, basis.d1);
    EXPECT_EQ(g.dd2n_dw, basis.d2);
}

class FlnnProperty : public ::testing::TestWithParam<Activation> {};

TEST_P(FlnnProperty, WeightGradientsMatchFiniteDifferences) {
    oracle::Rng rng(GetParam() == Activation::Tanh ? 5 : 6);
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.index(7);
        NetworkParams p{rng.vec(m, -1, 1), GetParam()};
        const auto basis = eval_basis(BasisOrder(m), rng.uniform(0, 1));
        const auto g = weight_gradients(p, basis);
        // scale of each gradient sequence for the relative measure
        double s0 = 1e-9, s1 = 1e-9, s2 = 1e-9;
        for (std::size_t j = 0; j < m; ++j) {
            s0 = std::max(s0, std::abs(g.dn_dw[j]));
            s1 = std::max(s1, std::abs(g.ddn_dw[j]));
            s2 = std::max(s2, std::abs(g.dd2n_dw[j]));
        }
        for (std::size_t j = 0; j < m; ++j) {
            NetworkParams up = p, down = p;
            up.weights[j] += h;
            down.weights[j] -= h;
            const auto fu = forward(up, basis), fd = forward(down, basis);
            EXPECT_LT(std::abs(g.dn_dw[j] - (fu.n - fd.n) / (2 * h)) / s0, 1e-6);
            EXPECT_LT(std::abs(g.ddn_dw[j] - (fu.dn - fd.dn) / (2 * h)) / s1, 1e-6);
            EXPECT_LT(std::abs(g.dd2n_dw[j] - (fu.d2n - fd.d2n) / (2 * h)) / s2, 1e-6);
        }
    }
}

TEST_P(FlnnProperty, EtaDerivativesMatchFiniteDifferences) {
    oracle::Rng rng(GetParam() == Activation::Tanh ? 7 : 8);
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.index(7);
        const auto w = rng.vec(m, -1, 1);
        const double eta = rng.uniform(0.01, 0.99);
        const auto c = forward_at(w, GetParam(), eta);
        const auto up = forward_at(w, GetParam(), eta + h);
        const auto down = forward_at(w, GetParam(), eta - h);
        EXPECT_LT(oracle::rel_err(c.dn, (up.n - down.n) / (2 * h), 1e-3), 1e-6);
        EXPECT_LT(oracle::rel_err(c.d2n, (up.dn - down.dn) / (2 * h), 1e-2), 1e-6);
    }
}

INSTANTIATE_TEST_SUITE_P(Activations, FlnnProperty, ::testing::Values(Activation::Tanh, Activation::Identity),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(FlnnInvariants, IdentityDoublingWeightsDoublesOutputs) {
    oracle::Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        auto w = rng.vec(5, -3, 3);
        const double eta = rng.uniform(0, 1);
        const auto a = forward_at(w, Activation::Identity, eta);
        for (auto& x : w) x *= 2;
        const auto b = forward_at(w, Activation::Identity, eta);
        EXPECT_EQ(b.n, 2 * a.n);
        EXPECT_EQ(b.dn, 2 * a.dn);
        EXPECT_EQ(b.d2n, 2 * a.d2n);
    }
}

TEST(FlnnInvariants, TanhBounded) {
    oracle::Rng rng(10);
    for (int trial = 0; trial < 200; ++trial) {
        // |C| <= 5 here, well inside the range where tanh rounds below 1
        EXPECT_LT(std::abs(forward_at(rng.vec(5, -1, 1), Activation::Tanh, rng.uniform(0, 1)).n), 1.0);
    }
    for (int trial = 0; trial < 200; ++trial) {
        const auto out = forward_at(rng.vec(5, -5, 5), Activation::Tanh, rng.uniform(0, 1));
        EXPECT_LE(std::abs(out.n), 1.0);
        EXPECT_TRUE(std::isfinite(out.dn) && std::isfinite(out.d2n));
    }
}
