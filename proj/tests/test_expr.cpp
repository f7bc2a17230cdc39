#include <gtest/gtest.h>

#include "fpk/expr.hpp"
#include "fpk/report.hpp"
#include "testing_util.hpp"

using namespace fpk;

namespace {

ChartPtr chart3() { return make_chart({"x", "y", "z"}, Interval{-1.0, 1.0}, 7); }

double eval_at(const Expr& e, double x, double y, double z) {
    return evaluate(e, Point{{"x", x}, {"y", y}, {"z", z}});
}

} // namespace

TEST(Expr, EvaluatesWithPrecedence) {
    auto c = chart3();
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("2 + 3*4", *c), 0, 0, 0), 14.0);
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("(2 + 3)*4", *c), 0, 0, 0), 20.0);
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("2*3^2", *c), 0, 0, 0), 18.0);
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("-2^2", *c), 0, 0, 0), -4.0);
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("2 - 3 - 4", *c), 0, 0, 0), -5.0);
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("12/3/2", *c), 0, 0, 0), 2.0);
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("x*y - z^3", *c), 2, 3, 2), -2.0);
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("sin(x)^2 + cos(x)^2", *c), 0.37, 0, 0), 1.0);
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("exp(-(x + y))", *c), 0.25, 0.5, 0),
                     std::exp(-0.75));
    EXPECT_DOUBLE_EQ(eval_at(parse_expr("1.5e2 + 2.5E-1", *c), 0, 0, 0), 150.25);
}

TEST(Expr, PrintParseFixedPoint) {
    auto c = chart3();
    for (const char* text :
         {"x + y*z", "(x + y)*z", "x - (y - z)", "-(x^2)", "sin(x)*cos(y) - exp(z)",
          "x*(y + z)", "x/(y + 2)", "x^3 - 2*x + 1", "-x", "0.5*x", "x*y*z",
          "1 + 5*y*y", "(-1)*y", "2 - x/(1 + y*y)"}) {
        Expr once = parse_expr(text, *c);
        std::string printed = to_string(once);
        Expr twice = parse_expr(printed, *c);
        EXPECT_EQ(printed, to_string(twice)) << "source: " << text;
        EXPECT_TRUE(once.same_tree(twice)) << "source: " << text;
    }
}

TEST(Expr, PrinterShapes) {
    auto c = chart3();
    EXPECT_EQ(to_string(parse_expr("x*(y+z)", *c)), "x*(y + z)");
    EXPECT_EQ(to_string(parse_expr("x- y", *c)), "x - y");
    EXPECT_EQ(to_string(parse_expr("x^2", *c)), "x^2");
    EXPECT_EQ(to_string(Expr(-2.5) * Expr::coordinate("x")), "(-2.5)*x");
    EXPECT_EQ(to_string(Expr(0.0)), "0");
    EXPECT_EQ(to_string(Expr(1.0)), "1");
}

TEST(Expr, LocalFolds) {
    Expr x = Expr::coordinate("x");
    EXPECT_TRUE((x - x).is_zero());
    EXPECT_TRUE((Expr(-1.0) * x + x).is_zero());
    EXPECT_TRUE((Expr(2.0) * x - Expr(2.0) * x).is_zero());
    EXPECT_TRUE((Expr(0.0) * x).is_zero());
    EXPECT_TRUE((x * Expr(1.0)).same_tree(x));
    EXPECT_TRUE((-(-x)).same_tree(x));
    EXPECT_TRUE(pow(x, 0).is_one());
    EXPECT_TRUE(pow(x, 1).same_tree(x));
    EXPECT_TRUE((Expr(3.0) * (Expr(2.0) * x)).same_tree(Expr(6.0) * x));
    EXPECT_TRUE((x / Expr(2.0)).same_tree(Expr(0.5) * x));
    EXPECT_TRUE((x + Expr(2.0) * x).same_tree(Expr(3.0) * x));
}

TEST(Expr, SyntaxErrors) {
    auto c = chart3();
    EXPECT_THROW(parse_expr("x +", *c), SyntaxError);
    EXPECT_THROW(parse_expr(")", *c), SyntaxError);
    EXPECT_THROW(parse_expr("x^-2", *c), SyntaxError);
    EXPECT_THROW(parse_expr("x^y", *c), SyntaxError);
    EXPECT_THROW(parse_expr("sin x", *c), SyntaxError);
    EXPECT_THROW(parse_expr("", *c), SyntaxError);
    EXPECT_THROW(parse_expr("x  y", *c), SyntaxError);
    EXPECT_THROW(parse_expr("1..2", *c), SyntaxError);
    EXPECT_THROW(parse_expr("w + 1", *c), UnknownCoordinate);
    try {
        parse_expr("x + (y", *c);
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_GT(e.position, 0u);
    }
}

TEST(Expr, DifferentiateMatchesFiniteDifferences) {
    auto c = chart3();
    const char* cases[] = {"x*y*z", "sin(x*y)", "exp(x - z^2)", "x^3 + 2*x*y",
                           "cos(x)/(2 + sin(y))", "x/(1 + y*y)"};
    auto points = oracle::sample_points(*c, 10, "expr-fd");
    for (const char* text : cases) {
        Expr e = parse_expr(text, *c);
        for (const auto& coord : c->coordinates()) {
            Expr de = differentiate(e, coord);
            for (const auto& p : points) {
                double sym = evaluate(de, p);
                double fd = oracle::fd_derivative(e, coord, p);
                EXPECT_NEAR(sym, fd, 1e-5 * (1.0 + std::abs(sym)))
                    << text << " d/d" << coord;
            }
        }
    }
}

TEST(Expr, DifferentiateUnknownCoordinateIsZero) {
    auto c = chart3();
    Expr e = parse_expr("x*y", *c);
    EXPECT_TRUE(differentiate(e, "nope").is_zero());
}

TEST(Expr, DagSharingIsPreserved) {
    Expr x = Expr::coordinate("x");
    Expr y = Expr::coordinate("y");
    Expr q = x * y;
    Expr e = q * q + q;
    EXPECT_EQ(dag_size(q), 3);
    EXPECT_EQ(dag_size(e), 5);
    Expr d = differentiate(e, "x");
    EXPECT_LT(dag_size(d), 16);
}

TEST(Expr, DivisionGuard) {
    auto c = chart3();
    Expr e = parse_expr("1/x", *c);
    EXPECT_THROW(evaluate(e, Point{{"x", 1e-13}, {"y", 0.0}, {"z", 0.0}}), DivisionNearZero);
    EXPECT_DOUBLE_EQ(eval_at(e, 0.5, 0, 0), 2.0);
    Expr never = parse_expr("1/(x - x)", *c);
    EXPECT_THROW(expr_zero(never, *c, 20, 1e-9), SamplingExhausted);
}

TEST(Expr, PowRejectsBadExponents) {
    Expr x = Expr::coordinate("x");
    EXPECT_THROW(pow(x, -1), Error);
    auto c = chart3();
    EXPECT_THROW(parse_expr("x^2000000", *c), SyntaxError);
}

TEST(Expr, SamplingIsDeterministic) {
    auto c = chart3();
    Expr e = parse_expr("x*y - x*y + 1e-12", *c);
    CheckReport a = expr_zero(e, *c, 50, 1e-9, "det-check");
    CheckReport b = expr_zero(e, *c, 50, 1e-9, "det-check");
    EXPECT_EQ(a.max_residual, b.max_residual);
    EXPECT_EQ(a.witness, b.witness);
    EXPECT_TRUE(a.pass);
    CheckReport other = expr_zero(e, *c, 50, 1e-9, "other-label");
    EXPECT_NE(other.witness, a.witness);
}

TEST(Expr, ExprsZeroFindsWitness) {
    auto c = chart3();
    std::vector<Expr> bundle{parse_expr("0", *c), parse_expr("x - 0.5", *c)};
    CheckReport r = exprs_zero(bundle, *c, 40, 1e-9, "witness-check");
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.max_residual, 1e-3);
    ASSERT_EQ(r.witness.count("x"), 1u);
    EXPECT_NEAR(std::abs(evaluate(bundle[1], r.witness)), r.max_residual, 1e-15);
}

TEST(Expr, VacuousBundlePasses) {
    auto c = chart3();
    CheckReport r = exprs_zero({}, *c, 40, 1e-9, "empty");
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.samples_used, 0);
}
