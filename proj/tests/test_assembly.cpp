#include <doctest.h>

#include <cmath>
#include <random>

#include "adveig/assembly.hpp"
#include "adveig/errors.hpp"
#include "adveig/kernels.hpp"
#include "adveig/report.hpp"

using namespace adveig;

namespace {

CoefficientSet make_coeffs(const Grid& g, const std::string& a, const std::string& c,
                           const FlowSpec& fs, double amplitude) {
    CoefficientSet cs;
    cs.grid = &g;
    cs.a = ScalarField::from_expr(g, a);
    cs.c = ScalarField::from_expr(g, c);
    cs.flow = realize(fs, g);
    cs.amplitude = amplitude;
    return cs;
}

FlowSpec cellular() {
    FlowSpec fs;
    fs.kind = FlowKind::StreamFunction;
    fs.psi = expr::parse("sin(pi*x)*sin(pi*y)");
    return fs;
}

FlowSpec constant1d(double v) {
    FlowSpec fs;
    fs.kind = FlowKind::Constant;
    fs.cx = v;
    return fs;
}

double entry(const OperatorMatrix& m, std::size_t r, std::size_t c) {
    for (std::int32_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k)
        if (m.col()[k] == static_cast<std::int32_t>(c)) return m.values()[k];
    return 0.0;
}

}  // namespace

TEST_CASE("1D Laplacian interior row at h=1/4") {
    Grid g = Grid::interval(0.0, 1.0, 5);
    CoefficientSet cs = make_coeffs(g, "1", "0", FlowSpec{}, 0.0);
    OperatorMatrix m = assemble(cs, BoundaryCondition::dirichlet());
    CHECK(entry(m, 2, 1) == doctest::Approx(-16.0));
    CHECK(entry(m, 2, 2) == doctest::Approx(32.0));
    CHECK(entry(m, 2, 3) == doctest::Approx(-16.0));
    // Dirichlet boundary rows are identity rows.
    CHECK(entry(m, 0, 0) == 1.0);
    CHECK(entry(m, 0, 1) == 0.0);
}

TEST_CASE("Robin ghost elimination pattern at the left endpoint") {
    // kappa = 1: -(2/h^2)(u1 - u0) + (2/h) u0 + c0 u0.
    Grid g = Grid::interval(0.0, 1.0, 9);
    const double h = g.hx();
    CoefficientSet cs = make_coeffs(g, "1", "x+2", FlowSpec{}, 0.0);
    BoundaryCondition bc = BoundaryCondition::robin(0.5);
    CHECK(bc.kappa() == doctest::Approx(1.0));
    OperatorMatrix m = assemble(cs, bc);
    CHECK(entry(m, 0, 0) == doctest::Approx(2.0 / (h * h) + 2.0 / h + 2.0));
    CHECK(entry(m, 0, 1) == doctest::Approx(-2.0 / (h * h)));
}

TEST_CASE("constants lie in the kernel for Neumann, c = 0, tangential flow") {
    Grid g = Grid::rectangle(0.0, 1.0, 0.0, 1.0, 65, 65);
    CoefficientSet cs = make_coeffs(g, "1", "0", cellular(), 8.0);
    OperatorMatrix m = assemble(cs, BoundaryCondition::neumann());
    ScalarField ones(g, 1.0);
    ScalarField r = apply(m, ones);
    CHECK(kernels::max_abs(r.data(), r.size()) <= 1e-10);
}

TEST_CASE("adjoint assembly equals the flow-reversed assembly entrywise") {
    Grid g = Grid::rectangle(0.0, 1.0, 0.0, 1.0, 33, 33);
    CoefficientSet cs = make_coeffs(g, "1+x*y/4", "cos(pi*x)", cellular(), 3.0);
    OperatorMatrix adj = assemble_adjoint(cs, BoundaryCondition::neumann());
    CoefficientSet neg = cs;
    neg.amplitude = -3.0;
    OperatorMatrix rev = assemble(neg, BoundaryCondition::neumann());
    REQUIRE(adj.values().size() == rev.values().size());
    for (std::size_t k = 0; k < adj.values().size(); ++k)
        CHECK(adj.values()[k] == rev.values()[k]);
}

TEST_CASE("A = 0 adjoint equals forward exactly") {
    Grid g = Grid::rectangle(0.0, 1.0, 0.0, 1.0, 17, 17);
    CoefficientSet cs = make_coeffs(g, "1", "x", cellular(), 0.0);
    OperatorMatrix fwd = assemble(cs, BoundaryCondition::robin(0.25));
    OperatorMatrix adj = assemble_adjoint(cs, BoundaryCondition::robin(0.25));
    for (std::size_t k = 0; k < fwd.values().size(); ++k)
        CHECK(fwd.values()[k] == adj.values()[k]);
}

TEST_CASE("advection block is skew in the quadrature inner product") {
    Grid g = Grid::rectangle(0.0, 1.0, 0.0, 1.0, 33, 33);
    CoefficientSet cs = make_coeffs(g, "1", "0", cellular(), 1.0);
    OperatorMatrix t = assemble_advection(cs, BoundaryCondition::neumann());
    const auto& w = g.weights();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        // fields vanishing at boundary rows
        ScalarField f(g), h(g);
        for (std::size_t i = 0; i < g.node_count(); ++i)
            if (!g.is_boundary(i)) {
                f[i] = U(rng);
                h[i] = U(rng);
            }
        ScalarField tf = apply(t, f), th = apply(t, h);
        const double lhs = kernels::dot3(w.data(), tf.data(), h.data(), w.size());
        const double rhs = kernels::dot3(w.data(), f.data(), th.data(), w.size());
        CHECK(std::fabs(lhs + rhs) <= 1e-10 * (1.0 + std::fabs(lhs)));
    }
}

TEST_CASE("adjoint consistency across regimes") {
    // self-adjoint case
    Grid g = Grid::rectangle(0.0, 1.0, 0.0, 1.0, 33, 33);
    CoefficientSet cs0 = make_coeffs(g, "1", "x", FlowSpec{}, 0.0);
    CHECK(adjoint_consistency_check(cs0, BoundaryCondition::neumann()) <= 1e-12);

    // cellular flow, Neumann, A = 8: discrete skew-adjointness
    Grid g2 = Grid::rectangle(0.0, 1.0, 0.0, 1.0, 65, 65);
    CoefficientSet cs1 = make_coeffs(g2, "1", "cos(pi*x)", cellular(), 8.0);
    CHECK(adjoint_consistency_check(cs1, BoundaryCondition::neumann()) <= 1e-8);

    // 1D, V = 1, Neumann: V.n != 0, the boundary term survives at O(1)
    Grid line = Grid::interval(0.0, 1.0, 129);
    CoefficientSet cs2 = make_coeffs(line, "1", "x", constant1d(1.0), 1.0);
    const double r = adjoint_consistency_check(cs2, BoundaryCondition::neumann());
    CHECK(r >= 1e-3);  // reported, not failed: documents the V.n != 0 regime
}

TEST_CASE("apply reproduces boundary values and annihilates affine fields") {
    Grid g = Grid::interval(0.0, 1.0, 65);
    CoefficientSet cs = make_coeffs(g, "1", "0", FlowSpec{}, 0.0);
    OperatorMatrix m = assemble(cs, BoundaryCondition::dirichlet());
    ScalarField f = ScalarField::from_expr(g, "x+0.5");
    ScalarField mf = apply(m, f);
    CHECK(mf[0] == f[0]);
    CHECK(mf[g.node_count() - 1] == f[g.node_count() - 1]);
    for (std::size_t i = 1; i + 1 < g.node_count(); ++i) CHECK(std::fabs(mf[i]) <= 1e-9);
}

TEST_CASE("apply to the continuum eigenfunction converges at second order") {
    auto dev = [](int nx) {
        Grid g = Grid::interval(0.0, 1.0, nx);
        CoefficientSet cs = make_coeffs(g, "1", "0", FlowSpec{}, 0.0);
        OperatorMatrix m = assemble(cs, BoundaryCondition::dirichlet());
        ScalarField u = ScalarField::from_expr(g, "sin(pi*x)");
        ScalarField mu = apply(m, u);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < g.node_count(); ++i)
            worst = std::max(worst, std::fabs(mu[i] - M_PI * M_PI * u[i]));
        return worst;
    };
    const double coarse = dev(201);
    CHECK(coarse <= 0.01);
    CHECK(std::log2(coarse / dev(401)) >= 1.9);
}

TEST_CASE("grid Peclet guard") {
    Grid g = Grid::interval(0.0, 1.0, 65);
    CoefficientSet hot = make_coeffs(g, "1", "0", constant1d(1.0), 1000.0);
    CHECK(assemble(hot, BoundaryCondition::dirichlet()).peclet_warning());
    CoefficientSet cold = make_coeffs(g, "1", "0", constant1d(1.0), 1.0);
    CHECK_FALSE(assemble(cold, BoundaryCondition::dirichlet()).peclet_warning());
}

TEST_CASE("ellipticity violations are rejected") {
    Grid g = Grid::interval(0.0, 1.0, 9);
    CoefficientSet cs = make_coeffs(g, "x", "0", FlowSpec{}, 0.0);  // a(0) = 0
    CHECK_THROWS_AS(assemble(cs, BoundaryCondition::neumann()), Error);
}

TEST_CASE("combine forms literal matrix combinations") {
    Grid g = Grid::interval(0.0, 1.0, 33);
    CoefficientSet ca = make_coeffs(g, "1", "x", constant1d(1.0), 4.0);
    CoefficientSet c0 = ca;
    c0.amplitude = 0.0;
    OperatorMatrix ma = assemble(ca, BoundaryCondition::dirichlet());
    OperatorMatrix m0 = assemble(c0, BoundaryCondition::dirichlet());
    OperatorMatrix lb = combine(0.25, ma, 0.75, m0);
    CoefficientSet cb = ca;
    cb.amplitude = 1.0;
    OperatorMatrix direct = assemble(cb, BoundaryCondition::dirichlet());
    for (std::size_t k = 0; k < lb.values().size(); ++k)
        CHECK(lb.values()[k] == doctest::Approx(direct.values()[k]).epsilon(1e-14));
}

TEST_CASE("matrix market export is well formed and deterministic") {
    Grid g = Grid::interval(0.0, 1.0, 5);
    CoefficientSet cs = make_coeffs(g, "1", "0", FlowSpec{}, 0.0);
    OperatorMatrix m = assemble(cs, BoundaryCondition::dirichlet());
    const std::string path = "/tmp/adveig_test_matrix.mtx";
    write_matrix_market(m, path);
    const std::string body = read_text_file(path);
    CHECK(body.rfind("%%MatrixMarket matrix coordinate real general\n", 0) == 0);
    CHECK(body.find("\n5 5 " + std::to_string(m.values().size()) + "\n") != std::string::npos);
    write_matrix_market(m, path);
    CHECK(read_text_file(path) == body);
}
