#include <gtest/gtest.h>

#include "fpk/catalog.hpp"
#include "fpk/document.hpp"
#include "fpk/fstructure.hpp"

using namespace fpk;

namespace {

struct BaseData {
    ChartPtr chart;
    KForm omega;
    EndField j;
    MetricField g;
    std::vector<KForm> connection;
};

BaseData good_base(int k, const std::vector<double>& alphas) {
    BaseData d;
    d.chart = make_chart({"x1", "y1"}, Interval{-1.0, 1.0}, kCatalogSeed);
    d.omega = wedge(coordinate_form(d.chart, 0), coordinate_form(d.chart, 1));
    ExprMatrix jm(2, 2);
    jm(0, 0) = Expr(0.0);
    jm(0, 1) = Expr(-1.0);
    jm(1, 0) = Expr(1.0);
    jm(1, 1) = Expr(0.0);
    d.j = EndField{d.chart, jm};
    ExprMatrix gm(2, 2);
    gm(0, 0) = Expr(1.0);
    gm(0, 1) = Expr(0.0);
    gm(1, 0) = Expr(0.0);
    gm(1, 1) = Expr(1.0);
    d.g = MetricField{d.chart, gm};
    for (int i = 0; i < k; ++i) {
        KForm theta = make_kform(d.chart, 1);
        add_term(theta, {0}, Expr(alphas[i] / 2.0) * Expr::coordinate("y1"));
        add_term(theta, {1}, Expr(-alphas[i] / 2.0) * Expr::coordinate("x1"));
        d.connection.push_back(std::move(theta));
    }
    return d;
}

std::string precondition_message(const BaseData& d, int k, const std::vector<double>& alphas) {
    try {
        from_symplectic_base(2, d.omega, d.j, d.g, k, alphas, d.connection);
    } catch (const PreconditionViolated& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Catalog, LabelsAreStable) {
    auto cat = catalog_structures();
    ASSERT_EQ(cat.size(), 6u);
    EXPECT_EQ(cat[0].first, "standard_contact(1)");
    EXPECT_EQ(cat[1].first, "standard_contact(2)");
    EXPECT_EQ(cat[2].first, "generalized_heisenberg(1,1,(1))");
    EXPECT_EQ(cat[3].first, "generalized_heisenberg(1,2,(1,2))");
    EXPECT_EQ(cat[4].first, "generalized_heisenberg(2,2,(0,1))");
    EXPECT_EQ(cat[5].first, "symplectic_base_example(2,(1,1))");
}

TEST(Catalog, ContactIsCorankOneHeisenberg) {
    FpkStructure contact = standard_contact(2);
    FpkStructure heis = generalized_heisenberg(2, 1, {1.0});
    auto a = validate_fpk(contact);
    auto b = validate_fpk(heis);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].identity, b[i].identity);
        EXPECT_EQ(a[i].pass, b[i].pass);
        EXPECT_DOUBLE_EQ(a[i].max_residual, b[i].max_residual);
        EXPECT_EQ(a[i].samples_used, b[i].samples_used);
    }
    EXPECT_EQ(contact.chart->coordinate(4), "z");
    EXPECT_EQ(heis.chart->coordinate(4), "z1");
}

TEST(Catalog, SymplecticBasePreconditionGates) {
    std::vector<double> alphas{1.0};

    {
        BaseData d = good_base(1, alphas);
        d.omega = make_kform(d.chart, 2);
        std::string msg = precondition_message(d, 1, alphas);
        EXPECT_NE(msg.find("nondegeneracy of omega"), std::string::npos) << msg;
    }
    {
        BaseData d = good_base(1, alphas);
        ExprMatrix jm(2, 2);
        jm(0, 0) = Expr(0.0);
        jm(0, 1) = Expr(1.0);
        jm(1, 0) = Expr(1.0);
        jm(1, 1) = Expr(0.0);
        d.j = EndField{d.chart, jm};
        std::string msg = precondition_message(d, 1, alphas);
        EXPECT_NE(msg.find("J^2 = -Id"), std::string::npos) << msg;
    }
    {
        BaseData d = good_base(1, alphas);
        ExprMatrix gm(2, 2);
        gm(0, 0) = Expr(2.0);
        gm(0, 1) = Expr(0.0);
        gm(1, 0) = Expr(0.0);
        gm(1, 1) = Expr(2.0);
        d.g = MetricField{d.chart, gm};
        std::string msg = precondition_message(d, 1, alphas);
        EXPECT_NE(msg.find("G(X,Y) = omega(X,JY)"), std::string::npos) << msg;
    }
    {
        BaseData d = good_base(1, alphas);
        d.connection[0] = make_kform(d.chart, 1);
        std::string msg = precondition_message(d, 1, alphas);
        EXPECT_NE(msg.find("d(connection[1]) = -alpha omega"), std::string::npos) << msg;
    }
    {
        auto four = make_chart({"x1", "x2", "y1", "y2"}, Interval{-1.0, 1.0}, kCatalogSeed);
        KForm omega = wedge(coordinate_form(four, 0), coordinate_form(four, 2)) +
                      wedge(coordinate_form(four, 1), coordinate_form(four, 3)) +
                      Expr::coordinate("x2") *
                          wedge(coordinate_form(four, 0), coordinate_form(four, 3));
        ExprMatrix jm(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) jm(i, j) = Expr(0.0);
        jm(2, 0) = Expr(1.0);
        jm(3, 1) = Expr(1.0);
        jm(0, 2) = Expr(-1.0);
        jm(1, 3) = Expr(-1.0);
        ExprMatrix gm(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) gm(i, j) = Expr(i == j ? 1.0 : 0.0);
        KForm theta = make_kform(four, 1);
        try {
            from_symplectic_base(4, omega, EndField{four, jm}, MetricField{four, gm}, 1, alphas,
                                 {theta});
            FAIL() << "expected PreconditionViolated";
        } catch (const PreconditionViolated& e) {
            EXPECT_NE(std::string(e.what()).find("d(omega) = 0"), std::string::npos) << e.what();
        }
    }
}

TEST(Catalog, SymplecticBaseShapeGuards) {
    std::vector<double> alphas{1.0};
    BaseData d = good_base(1, alphas);
    EXPECT_THROW(from_symplectic_base(3, d.omega, d.j, d.g, 1, alphas, d.connection),
                 DimensionMismatch);
    EXPECT_THROW(from_symplectic_base(2, d.omega, d.j, d.g, 0, {}, {}), DimensionMismatch);
    EXPECT_THROW(from_symplectic_base(2, d.omega, d.j, d.g, 2, alphas, d.connection),
                 DimensionMismatch);
    KForm bad_degree = make_kform(d.chart, 1);
    EXPECT_THROW(from_symplectic_base(2, bad_degree, d.j, d.g, 1, alphas, d.connection),
                 DimensionMismatch);
}

TEST(Catalog, StructuresEmitValidDocuments) {
    for (const auto& [name, s] : catalog_structures()) {
        ManifoldDocument doc = from_structure(s);
        std::string text = emit_document(doc);
        ManifoldDocument parsed = parse_document(text);
        EXPECT_EQ(emit_document(parsed), text) << name;
        FpkStructure loaded = to_structure(parsed);
        for (const auto& r : validate_fpk(loaded, 20))
            EXPECT_TRUE(r.pass) << name << " " << r.identity << " " << r.max_residual;
    }
}

TEST(Catalog, ConstructionIsDeterministic) {
    auto a = catalog_structures();
    auto b = catalog_structures();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(emit_document(from_structure(a[i].second)),
                  emit_document(from_structure(b[i].second)));
}

TEST(Catalog, HeisenbergStructureEquations) {
    FpkStructure s = generalized_heisenberg(2, 2, {0.0, 1.0});
    KForm phi_g = fundamental_form(s);
    for (int i = 0; i < s.k; ++i) {
        KForm residual = exterior_derivative(s.eta[i]) + Expr(s.alpha[i]) * phi_g;
        std::vector<Expr> bundle;
        for (const auto& [idx, coeff] : residual.coefficients) bundle.push_back(coeff);
        if (bundle.empty()) continue;
        CheckReport r = exprs_zero(bundle, *s.chart, 40, 1e-12, "structure-eq");
        EXPECT_TRUE(r.pass) << "eta " << i << " residual " << r.max_residual;
    }
}
