#include "oracles.hpp"

#include <slnn/expr.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <string>
#include <vector>

using namespace slnn::expr;

namespace {

// Every entry is defined on (0.1, 0.9)^2.
const std::vector<std::string> kCorpus = {
    "xi^5",
    "xi",
    "6 + 12*eta + eta^2 + eta^3",
    "eta^2 + eta^3",
    "(1 + eta^2/3)^(-1/2)",
    "0",
    "sin(xi)*eta",
    "exp(xi)",
    "exp(-2*xi)",
    "xi^3 + eta*xi",
    "exp(xi) - exp(-xi)",
    "ln(xi)",
    "sqrt(xi)",
    "sqrt(1 + xi^2)",
    "1/xi",
    "eta/(1 + xi)",
    "xi/(1 + eta)",
    "-xi^2",
    "-(xi + eta)",
    "--xi",
    "2^3^2 * xi",
    "xi^-2",
    "xi^(0.5)",
    "(xi^2)^3",
    "cos(xi) - sin(eta)",
    "cos(eta*xi)",
    "exp(sin(xi))",
    "ln(1 + eta*xi^2)",
    "4*(xi^(3/2))",
    "xi*xi*xi",
    "xi - xi^2/2 + xi^3/3",
    "(xi - 1)*(xi + 1)",
    "1e-3*xi + 2.5E2",
    ".5*xi",
    "3.25",
    "eta",
    "eta^3 - 2*eta + 7",
    "sin(3*eta)",
    "xi/eta",
    "(eta + xi)/(eta - 2)",
    "sqrt(eta)*xi^4",
    "exp(xi)/(1 + exp(xi))",
    "xi^2*ln(eta + 1)",
    "1 - 2*3 - 4",
    "8/4/2*xi",
    "2*-xi",
    "cos(xi)^2 + sin(xi)^2",
    "xi*(eta - (xi - eta))",
    "  xi  ^  2  ",
    "sqrt(exp(xi))*cos(sqrt(xi))",
};

const std::vector<std::string>& corpus() { return kCorpus; }

} // namespace

TEST(Parse, PowerNode) {
    const Expr e = parse("xi^5");
    const auto* p = std::get_if<Power>(&e.root().data);
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(p->exponent, 5.0);
    ASSERT_NE(std::get_if<Variable>(&p->base->data), nullptr);
    EXPECT_EQ(std::get<Variable>(p->base->data).var, Var::Xi);
}

TEST(Parse, SumChain) {
    const Expr e = parse("6 + 12*eta + eta^2 + eta^3");
    const auto* top = std::get_if<Binary>(&e.root().data);
    ASSERT_NE(top, nullptr);
    EXPECT_EQ(top->op, BinaryOp::Add);
    EXPECT_EQ(eval(e, 0.0, 0.0), 6.0);
}

TEST(Parse, Precedence) {
    EXPECT_EQ(eval(parse("-2^2"), 0, 0), -4.0);
    EXPECT_EQ(eval(parse("2^3^2"), 0, 0), 512.0);
    EXPECT_EQ(eval(parse("1 - 2 - 3"), 0, 0), -4.0);
    EXPECT_EQ(eval(parse("8/4/2"), 0, 0), 1.0);
    EXPECT_EQ(eval(parse("2 + 3*4"), 0, 0), 14.0);
    EXPECT_EQ(eval(parse("(2 + 3)*4"), 0, 0), 20.0);
    EXPECT_DOUBLE_EQ(eval(parse("(1 + eta^2/3)^(-1/2)"), 1.0, 0), 0.8660254037844386);
}

TEST(Parse, SyntaxErrorOffsets) {
    try {
        (void)parse("2*xi + ");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 7u);
    }
    try {
        (void)parse("(xi + 1");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 7u);
        EXPECT_NE(std::string(e.what()).find("')'"), std::string::npos);
    }
    try {
        (void)parse("xi $ 2");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 3u);
    }
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("   "), ParseError);
    EXPECT_THROW(parse("sin xi"), ParseError);
    EXPECT_THROW(parse("xi xi"), ParseError);
}

TEST(Parse, UnknownIdentifier) {
    try {
        (void)parse("2*xi' + 1");
        FAIL();
    } catch (const UnknownIdentifierError& e) {
        EXPECT_EQ(e.identifier(), "xi'");
        EXPECT_EQ(e.offset(), 2u);
    }
    try {
        (void)parse("tan(xi)");
        FAIL();
    } catch (const UnknownIdentifierError& e) {
        EXPECT_EQ(e.identifier(), "tan");
    }
}

TEST(Parse, VariableExponentRejected) {
    EXPECT_THROW(parse("xi^eta"), ParseError);
    EXPECT_THROW(parse("2^xi"), ParseError);
    EXPECT_THROW(parse("xi^(1/0)"), ParseError);
}

TEST(Eval, Basics) {
    EXPECT_EQ(eval(parse("xi^5"), 0.3, 2.0), 32.0);
    EXPECT_EQ(eval(parse("6 + 12*eta + eta^2 + eta^3"), 1.0, 0.0), 20.0);
    EXPECT_DOUBLE_EQ(eval(parse("sin(xi)*eta"), 2.0, 0.5), std::sin(0.5) * 2.0);
}

TEST(Eval, DomainErrors) {
    try {
        (void)eval(parse("1/eta"), 0.0, 0.0);
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), EvalError::Kind::DivisionByZero);
        EXPECT_EQ(e.subtree(), "1 / eta");
    }
    EXPECT_THROW(eval(parse("ln(xi)"), 0, -1), EvalError);
    EXPECT_THROW(eval(parse("ln(xi)"), 0, 0), EvalError);
    EXPECT_THROW(eval(parse("sqrt(xi - 1)"), 0, 0.5), EvalError);
    EXPECT_THROW(eval(parse("xi^0.5"), 0, -1), EvalError);
    EXPECT_THROW(eval(parse("xi^-1"), 0, 0), EvalError);
    EXPECT_EQ(eval(parse("xi^3"), 0, -2), -8.0);
    // overflow follows IEEE
    EXPECT_TRUE(std::isinf(eval(parse("exp(xi)"), 0, 1000.0)));
    try {
        (void)eval(parse("2 + sqrt(eta - 5)"), 1.0, 0.0);
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.subtree(), "sqrt(eta - 5)");
    }
}

TEST(Differentiate, Examples) {
    const Expr d = differentiate_xi(parse("xi^5"));
    EXPECT_EQ(eval(d, 0.0, 1.0), 5.0);
    EXPECT_EQ(eval(d, 0.0, 2.0), 80.0);
    EXPECT_EQ(d, parse("5*xi^4"));

    const Expr z = differentiate_xi(parse("6 + 12*eta"));
    EXPECT_EQ(z, Expr::constant(0.0));

    EXPECT_DOUBLE_EQ(eval(differentiate_xi(parse("sin(xi)*eta")), 2.0, 0.0), 2.0);
    EXPECT_EQ(differentiate_xi(parse("xi")), Expr::constant(1.0));
}

TEST(ExprProperty, PrintParseRoundTrip) {
    for (const auto& src : corpus()) {
        const Expr e = parse(src);
        const std::string printed = to_string(e);
        EXPECT_EQ(parse(printed), e) << src << " -> " << printed;
        EXPECT_EQ(to_string(parse(printed)), printed) << src;
    }
}

TEST(ExprProperty, DerivativePrintsAndReparses) {
    oracle::Rng rng(31);
    for (const auto& src : corpus()) {
        const Expr d = differentiate_xi(parse(src));
        const Expr back = parse(to_string(d));
        for (int i = 0; i < 5; ++i) {
            const double eta = rng.uniform(0.1, 0.9), xi = rng.uniform(0.1, 0.9);
            EXPECT_EQ(std::bit_cast<std::uint64_t>(eval(back, eta, xi)), std::bit_cast<std::uint64_t>(eval(d, eta, xi)))
                << src << " -> " << to_string(d);
        }
    }
}

TEST(ExprProperty, SymbolicMatchesFiniteDifference) {
    oracle::Rng rng(32);
    const double h = 1e-6;
    for (const auto& src : corpus()) {
        const Expr e = parse(src);
        const Expr d = differentiate_xi(e);
        for (int i = 0; i < 100; ++i) {
            const double eta = rng.uniform(0.1, 0.9), xi = rng.uniform(0.1, 0.9);
            const double fd = (eval(e, eta, xi + h) - eval(e, eta, xi - h)) / (2 * h);
            const double scale = std::max(1.0, std::abs(eval(e, eta, xi)));
            EXPECT_LT(oracle::rel_err(eval(d, eta, xi), fd, scale * 1e-3), 1e-6)
                << src << " at eta=" << eta << " xi=" << xi;
        }
    }
}

TEST(ExprProperty, EvaluationDeterministic) {
    oracle::Rng rng(33);
    for (const auto& src : corpus()) {
        const Expr a = parse(src), b = parse(src);
        const double eta = rng.uniform(0.1, 0.9), xi = rng.uniform(0.1, 0.9);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(eval(a, eta, xi)), std::bit_cast<std::uint64_t>(eval(b, eta, xi)));
    }
}

TEST(Expr, DependsOn) {
    EXPECT_TRUE(parse("xi + 1").depends_on(Var::Xi));
    EXPECT_FALSE(parse("xi + 1").depends_on(Var::Eta));
    EXPECT_TRUE(parse("sin(eta)^2").depends_on(Var::Eta));
}
