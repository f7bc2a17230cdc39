#include <gtest/gtest.h>

#include "fpk/catalog.hpp"
#include "fpk/fstructure.hpp"
#include "testing_util.hpp"

using namespace fpk;

namespace {

void expect_all_pass(const std::vector<CheckReport>& reports, const std::string& who) {
    for (const auto& r : reports)
        EXPECT_TRUE(r.pass) << who << ": " << r.identity << " residual " << r.max_residual
                            << " (tol " << r.tolerance << ")";
}

FpkStructure perturbed_contact2() {
    FpkStructure s = standard_contact(2);
    KForm delta = make_kform(s.chart, 1);
    add_term(delta, {s.chart->index_of("y1")}, Expr(0.1) * Expr::coordinate("x1"));
    return oracle::perturb_eta(s, 0, delta);
}

MetricField identity_metric(ChartPtr c) {
    int d = c->dimension();
    ExprMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Expr(i == j ? 1.0 : 0.0);
    return make_metric_field(c, m);
}

FpkStructure flat_phi_structure() {
    auto c = make_chart({"x", "y", "z"}, Interval{-1.0, 1.0}, 9);
    ExprMatrix m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = Expr(0.0);
    return make_fpk_structure(c, make_end_field(c, m), {coordinate_field(c, 2)},
                              {coordinate_form(c, 2)}, identity_metric(c), {1.0}, 1, 1);
}

} // namespace

TEST(FStructure, CatalogValidates) {
    for (const auto& [name, s] : catalog_structures()) {
        expect_all_pass(validate_fpk(s), name);
        expect_all_pass(verify_fundamental_form(s), name);
    }
}

TEST(FStructure, CatalogClassifies) {
    for (const auto& [name, s] : catalog_structures()) {
        Classification c = classify(s);
        EXPECT_TRUE(c.almost_K) << name;
        EXPECT_TRUE(c.almost_S) << name;
        EXPECT_TRUE(c.normal) << name;
        EXPECT_TRUE(c.cr_integrable) << name;
        ASSERT_EQ(c.fitted_alpha.size(), s.alpha.size()) << name;
        for (std::size_t i = 0; i < s.alpha.size(); ++i)
            EXPECT_NEAR(c.fitted_alpha[i], s.alpha[i], 1e-9) << name << " alpha " << i;
        expect_all_pass(c.reports, name);
    }
}

TEST(FStructure, CatalogPropositions) {
    for (const auto& [name, s] : catalog_structures())
        expect_all_pass(structure_propositions(s), name);
}

TEST(FStructure, PerturbedEtaFlipsAlmostS) {
    Classification c = classify(perturbed_contact2());
    EXPECT_TRUE(c.almost_K);
    EXPECT_FALSE(c.almost_S);
    ASSERT_EQ(c.fitted_alpha.size(), 1u);
    EXPECT_NEAR(c.fitted_alpha[0], 1.05, 1e-6);
    bool eta_failed = false, cross_failed = false;
    for (const auto& r : c.reports) {
        if (r.identity == "classify:almost-S-eta1" && !r.pass) eta_failed = true;
        if (r.identity == "classify:alpha-cross-check" && !r.pass) cross_failed = true;
    }
    EXPECT_TRUE(eta_failed);
    EXPECT_TRUE(cross_failed);
}

TEST(FStructure, PerturbedEtaFailsPropositionsGate) {
    EXPECT_THROW(structure_propositions(perturbed_contact2()), PreconditionNotAlmostS);
}

TEST(FStructure, PerturbedPhiBreaksValidation) {
    FpkStructure s = generalized_heisenberg(1, 1, {1.0});
    s.phi.matrix(0, 1) = s.phi.matrix(0, 1) + Expr(0.25) * Expr::coordinate("x1");
    auto reports = validate_fpk(s);
    bool failed = false;
    for (const auto& r : reports)
        if (!r.pass) {
            failed = true;
            EXPECT_FALSE(r.witness.empty()) << r.identity;
            EXPECT_GT(r.max_residual, r.tolerance);
        }
    EXPECT_TRUE(failed);
}

TEST(FStructure, CorankZeroAlmostComplex) {
    auto c = make_chart({"x", "y"}, Interval{-1.0, 1.0}, 5);
    ExprMatrix m(2, 2);
    m(0, 0) = Expr(0.0);
    m(1, 0) = Expr(-1.0);
    m(0, 1) = Expr(1.0);
    m(1, 1) = Expr(0.0);
    FpkStructure s =
        make_fpk_structure(c, make_end_field(c, m), {}, {}, identity_metric(c), {}, 1, 0);
    expect_all_pass(validate_fpk(s), "k=0");
    Classification cls = classify(s);
    EXPECT_TRUE(cls.almost_K);
    EXPECT_TRUE(cls.almost_S);
    EXPECT_TRUE(cls.fitted_alpha.empty());
}

TEST(FStructure, RankZeroDegenerate) {
    auto c = make_chart({"z1", "z2"}, Interval{-1.0, 1.0}, 6);
    ExprMatrix m(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = Expr(0.0);
    FpkStructure s = make_fpk_structure(c, make_end_field(c, m),
                                        {coordinate_field(c, 0), coordinate_field(c, 1)},
                                        {coordinate_form(c, 0), coordinate_form(c, 1)},
                                        identity_metric(c), {1.0, 2.0}, 0, 2);
    expect_all_pass(validate_fpk(s), "n=0");
    Classification cls = classify(s);
    EXPECT_TRUE(cls.almost_S);
    ASSERT_EQ(cls.fitted_alpha.size(), 2u);
    EXPECT_DOUBLE_EQ(cls.fitted_alpha[0], 1.0);
    EXPECT_DOUBLE_EQ(cls.fitted_alpha[1], 2.0);
}

TEST(FStructure, AlphaFitIllPosedOnDegeneratePhi) {
    EXPECT_THROW(classify(flat_phi_structure()), AlphaFitIllPosed);
}

TEST(FStructure, WrongDeclaredAlphaFailsCrossCheck) {
    FpkStructure s = generalized_heisenberg(1, 1, {1.0});
    s.alpha = {2.0};
    Classification c = classify(s);
    ASSERT_EQ(c.fitted_alpha.size(), 1u);
    EXPECT_NEAR(c.fitted_alpha[0], 1.0, 1e-9);
    EXPECT_TRUE(c.almost_S);
    bool cross_failed = false;
    for (const auto& r : c.reports)
        if (r.identity == "classify:alpha-cross-check") cross_failed = !r.pass;
    EXPECT_TRUE(cross_failed);
}

TEST(FStructure, ProjectorRanks) {
    FpkStructure s = generalized_heisenberg(1, 2, {1.0, 2.0});
    RankRange l = numeric_rank(projector_l(s), 40);
    EXPECT_TRUE(l.constant_rank());
    EXPECT_EQ(l.min_rank, 2);
    RankRange m = numeric_rank(projector_m(s), 40);
    EXPECT_TRUE(m.constant_rank());
    EXPECT_EQ(m.min_rank, 2);

    FpkStructure sc = standard_contact(2);
    RankRange lc = numeric_rank(projector_l(sc), 40);
    EXPECT_EQ(lc.min_rank, 4);
    EXPECT_EQ(lc.max_rank, 4);
}

TEST(FStructure, FundamentalFormMatchesMetricContraction) {
    FpkStructure s = generalized_heisenberg(2, 2, {0.0, 1.0});
    KForm phi_g = fundamental_form(s);
    EXPECT_EQ(phi_g.degree, 2);
    SplitMix64 rng(77);
    VectorField u = random_field(s.chart, rng);
    VectorField v = random_field(s.chart, rng);
    Expr direct = apply_form(phi_g, {u, v});
    Expr via_metric = metric_eval(s.g, apply(s.phi, u), v);
    CheckReport r = exprs_zero({direct - via_metric}, *s.chart, 60, 1e-9, "phi-g-def");
    EXPECT_TRUE(r.pass) << r.max_residual;
}

TEST(FStructure, NormalityTensorVanishesOnCatalog) {
    FpkStructure s = generalized_heisenberg(1, 2, {1.0, 2.0});
    int d = s.chart->dimension();
    std::vector<Expr> bundle;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            VectorField nv = normality_tensor(s, coordinate_field(s.chart, a),
                                              coordinate_field(s.chart, b));
            for (int i = 0; i < d; ++i) bundle.push_back(nv.components(i));
        }
    CheckReport r = exprs_zero(bundle, *s.chart, 60, 1e-9, "normality-direct");
    EXPECT_TRUE(r.pass) << r.max_residual;
}

TEST(FStructure, StableComplexStructure) {
    FpkStructure s = generalized_heisenberg(1, 2, {1.0, 2.0});
    EndField j = stable_complex_structure(s);
    int d = j.chart->dimension();
    ASSERT_EQ(d, 6);
    EXPECT_EQ(j.chart->coordinate(4), "t1");
    EXPECT_EQ(j.chart->coordinate(5), "t2");

    ExprMatrix sq = j.matrix * j.matrix;
    std::vector<Expr> bundle;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) bundle.push_back(sq(a, b) + Expr(a == b ? 1.0 : 0.0));
    CheckReport r = exprs_zero(bundle, *j.chart, 40, 1e-9, "J-squared");
    EXPECT_TRUE(r.pass) << r.max_residual;

    int z1 = j.chart->index_of("z1"), t1 = j.chart->index_of("t1");
    for (int a = 0; a < d; ++a) {
        EXPECT_TRUE(j.matrix(a, z1).same_tree(Expr(a == t1 ? 1.0 : 0.0)));
        EXPECT_TRUE(j.matrix(a, t1).same_tree(Expr(a == z1 ? -1.0 : 0.0)));
    }

    RankRange rk = numeric_rank(j, 40);
    EXPECT_EQ(rk.min_rank, 6);
    EXPECT_EQ(rk.max_rank, 6);
}

TEST(FStructure, MakeStructureRejectsBadShapes) {
    auto c = make_chart({"x", "y", "z"}, Interval{-1.0, 1.0}, 4);
    ExprMatrix m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = Expr(0.0);
    EndField phi = make_end_field(c, m);
    MetricField g = identity_metric(c);
    EXPECT_THROW(make_fpk_structure(c, phi, {}, {}, g, {}, 2, 0), DimensionMismatch);
    EXPECT_THROW(make_fpk_structure(c, phi, {coordinate_field(c, 2)}, {}, g, {1.0}, 1, 1),
                 DimensionMismatch);
    auto other = make_chart({"a", "b", "c"}, Interval{-1.0, 1.0}, 4);
    EXPECT_THROW(make_fpk_structure(other, phi, {coordinate_field(other, 2)},
                                    {coordinate_form(other, 2)}, g, {1.0}, 1, 1),
                 ChartMismatch);
}

TEST(FStructure, CatalogConstructorGuards) {
    EXPECT_THROW(standard_contact(0), DimensionMismatch);
    EXPECT_THROW(generalized_heisenberg(0, 2, {1.0, 2.0}), DimensionMismatch);
    EXPECT_THROW(generalized_heisenberg(1, 2, {1.0}), DimensionMismatch);
}
