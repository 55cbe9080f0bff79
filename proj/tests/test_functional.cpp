#include <doctest.h>

#include <cmath>
#include <random>

#include "adveig/analysis.hpp"
#include "adveig/errors.hpp"
#include "adveig/functional.hpp"
#include "adveig/kernels.hpp"

using namespace adveig;

namespace {

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

GridSpec line(int nx) {
    GridSpec gs;
    gs.dim = 1;
    gs.nx = nx;
    return gs;
}

GridSpec square(int n) {
    GridSpec gs;
    gs.dim = 2;
    gs.nx = gs.ny = n;
    return gs;
}

struct Setup {
    ProblemSpec spec;
    Solved solved;
    OperatorMatrix advection;
};

Setup neumann_cellular(int n, double amplitude) {
    Setup st{make_problem(square(n), 0.0, "1", "cos(pi*x)", cellular()), {}, {}};
    st.solved = solve_problem(st.spec, amplitude);
    st.advection = assemble_advection(st.spec.coefficients(0.0), st.spec.bc);
    return st;
}

Setup dirichlet_drift(int nx, double amplitude) {
    Setup st{make_problem(line(nx), 1.0, "1", "0", constant1d(1.0)), {}, {}};
    st.solved = solve_problem(st.spec, amplitude);
    st.advection = assemble_advection(st.spec.coefficients(0.0), st.spec.bc);
    return st;
}

}  // namespace

TEST_CASE("J at the eigenfunction equals lambda") {
    Setup st = neumann_cellular(65, 4.0);
    ConeElement eu = make_cone_element(st.solved.pair.u, st.spec.bc, st.spec.a);
    const double j = eval_J(eu, st.solved.pair, st.solved.m);
    CHECK(std::fabs(j - st.solved.pair.lambda) <= 1e-7 * (1.0 + std::fabs(st.solved.pair.lambda)));

    Setup sd = dirichlet_drift(257, 2.0);
    ConeElement ed = make_cone_element(sd.solved.pair.u, sd.spec.bc, sd.spec.a);
    const double jd = eval_J(ed, sd.solved.pair, sd.solved.m);
    CHECK(std::fabs(jd - sd.solved.pair.lambda) <= 1e-7 * (1.0 + std::fabs(sd.solved.pair.lambda)));
}

TEST_CASE("J at the adjoint eigenfunction stays below lambda") {
    Setup st = neumann_cellular(65, 4.0);
    ConeElement ev = make_cone_element(st.solved.pair.v, st.spec.bc, st.spec.a);
    const double jv = eval_J(ev, st.solved.pair, st.solved.m);
    CHECK(jv <= st.solved.pair.lambda + 1e-9);
    // and the drop is exactly twice A lambda'(A) for this advective family
    const double lp = derivative_by_formula(st.solved.pair, st.advection);
    CHECK(std::fabs((st.solved.pair.lambda - jv) - 2.0 * 4.0 * lp) <=
          1e-8 * (1.0 + std::fabs(st.solved.pair.lambda)));
}

TEST_CASE("J is invariant under scaling of the cone element") {
    Setup st = neumann_cellular(33, 2.0);
    std::mt19937_64 rng(5);
    ScalarField phi = random_cos_field(*st.spec.grid, rng, 2);
    ConeElement omega = cone_perturb(st.solved.pair, phi, 0.2, st.spec.bc, st.spec.a);
    ScalarField scaled = omega.omega;
    kernels::scale(scaled.data(), 4.75, scaled.size());
    ConeElement omega2 = make_cone_element(scaled, st.spec.bc, st.spec.a);
    const double j1 = eval_J(omega, st.solved.pair, st.solved.m);
    const double j2 = eval_J(omega2, st.solved.pair, st.solved.m);
    CHECK(std::fabs(j1 - j2) <= 1e-12 * (1.0 + std::fabs(j1)));
}

TEST_CASE("maximality: J(omega) <= J(u) over random cone elements") {
    Setup st = neumann_cellular(65, 4.0);
    const double lam = st.solved.pair.lambda;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> T(0.02, 0.3);
    for (int k = 0; k < 50; ++k) {
        ScalarField phi = random_cos_field(*st.spec.grid, rng, 2);
        ConeElement omega = cone_perturb(st.solved.pair, phi, T(rng), st.spec.bc, st.spec.a);
        CHECK(eval_J(omega, st.solved.pair, st.solved.m) <= lam + 1e-7);
    }
}

TEST_CASE("lemma 2.2 residual vanishes for multiples of u") {
    Setup st = neumann_cellular(33, 2.0);
    ConeElement eu = make_cone_element(st.solved.pair.u, st.spec.bc, st.spec.a);
    CHECK(lemma2_residual(eu, st.solved.pair, st.solved.m, st.spec.a) <= 1e-12);

    ScalarField scaled = st.solved.pair.u;
    kernels::scale(scaled.data(), 3.0, scaled.size());
    ConeElement cu = make_cone_element(scaled, st.spec.bc, st.spec.a);
    CHECK(lemma2_residual(cu, st.solved.pair, st.solved.m, st.spec.a) <= 1e-12);
}

TEST_CASE("lemma 2.2 residual is quadrature limited for genuine perturbations") {
    Setup st = neumann_cellular(129, 4.0);
    std::mt19937_64 rng(23);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        ScalarField phi = random_cos_field(*st.spec.grid, rng, 2);
        ConeElement omega = cone_perturb(st.solved.pair, phi, 0.02, st.spec.bc, st.spec.a);
        worst = std::max(worst, lemma2_residual(omega, st.solved.pair, st.solved.m, st.spec.a));
    }
    CHECK(worst <= 5e-6);
}

TEST_CASE("corollary 2.3 residual") {
    Setup s0 = neumann_cellular(65, 0.0);
    CHECK(corollary_residual(s0.solved.pair, s0.solved.m, s0.spec.a) <= 1e-10);

    Setup st = neumann_cellular(129, 4.0);
    CHECK(corollary_residual(st.solved.pair, st.solved.m, st.spec.a) <= 1e-5);

    Setup sd = dirichlet_drift(513, 2.0);
    CHECK(corollary_residual(sd.solved.pair, sd.solved.m, sd.spec.a) <= 1e-5);
}

TEST_CASE("derivative formula at A = 0 vanishes for compliant flows") {
    Setup st = neumann_cellular(65, 0.0);
    CHECK(std::fabs(derivative_by_formula(st.solved.pair, st.advection)) <= 1e-8);
}

TEST_CASE("derivative formula vanishes identically in the flat case") {
    ProblemSpec spec = make_problem(square(65), 0.0, "1", "0", cellular());
    OperatorMatrix advection = assemble_advection(spec.coefficients(0.0), spec.bc);
    for (double amplitude : {0.0, 4.0, 16.0}) {
        Solved s = solve_problem(spec, amplitude);
        CHECK(std::fabs(derivative_by_formula(s.pair, advection)) <= 1e-9);
    }
}

TEST_CASE("derivative formula matches the finite-difference eigenvalue slope") {
    Setup st = neumann_cellular(65, 4.0);
    const double f = derivative_by_formula(st.solved.pair, st.advection);
    const double d = 0.01;
    const double lp = principal_lambda(assemble(st.spec.coefficients(4.0 + d), st.spec.bc));
    const double lm = principal_lambda(assemble(st.spec.coefficients(4.0 - d), st.spec.bc));
    const double cd = (lp - lm) / (2.0 * d);
    CHECK(std::fabs(f - cd) <= std::max(1e-6, 1e-3 * std::fabs(f)));
    CHECK(f > 0.0);
}

TEST_CASE("criticality: directional derivatives of J vanish at u") {
    Setup st = neumann_cellular(65, 4.0);
    std::mt19937_64 rng(31);
    const double t = 1e-4;
    for (int k = 0; k < 10; ++k) {
        ScalarField phi = random_cos_field(*st.spec.grid, rng);
        ConeElement op = cone_perturb(st.solved.pair, phi, t, st.spec.bc, st.spec.a);
        ConeElement om = cone_perturb(st.solved.pair, phi, -t, st.spec.bc, st.spec.a);
        const double d =
            (eval_J(op, st.solved.pair, st.solved.m) - eval_J(om, st.solved.pair, st.solved.m)) /
            (2.0 * t);
        CHECK(std::fabs(d) <= 1e-5 * (1.0 + std::fabs(st.solved.pair.lambda)));
    }
}

TEST_CASE("sensitivity solve") {
    SUBCASE("no forcing gives u' = 0") {
        ProblemSpec spec = make_problem(line(129), 1.0, "1", "0", FlowSpec{});
        Solved s = solve_problem(spec, 0.0);
        OperatorMatrix t = assemble_advection(spec.coefficients(0.0), spec.bc);
        SensitivityField sf = solve_sensitivity(s.pair, s.m, t);
        CHECK(kernels::max_abs(sf.du.data(), sf.du.size()) <= 1e-10);
    }
    SUBCASE("flat case gives u' = 0") {
        ProblemSpec spec = make_problem(square(33), 0.0, "1", "0", cellular());
        Solved s = solve_problem(spec, 0.0);
        OperatorMatrix t = assemble_advection(spec.coefficients(0.0), spec.bc);
        SensitivityField sf = solve_sensitivity(s.pair, s.m, t);
        CHECK(kernels::max_abs(sf.du.data(), sf.du.size()) <= 1e-9);
    }
    SUBCASE("matches the finite-difference eigenvector derivative") {
        ProblemSpec spec = make_problem(line(513), 1.0, "1", "0", constant1d(1.0));
        Solved s = solve_problem(spec, 2.0);
        OperatorMatrix t = assemble_advection(spec.coefficients(0.0), spec.bc);
        SensitivityField sf = solve_sensitivity(s.pair, s.m, t);
        CHECK(sf.ortho_residual <= 1e-9);
        const double d = 1e-3;
        Solved sp = solve_problem(spec, 2.0 + d);
        Solved sm = solve_problem(spec, 2.0 - d);
        double worst = 0.0;
        for (std::size_t i = 0; i < sf.du.size(); ++i)
            worst = std::max(worst,
                             std::fabs((sp.pair.u[i] - sm.pair.u[i]) / (2.0 * d) - sf.du[i]));
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("second derivative of the eigenvalue at A = 0") {
    SUBCASE("flat case vanishes") {
        ProblemSpec spec = make_problem(square(33), 0.0, "1", "0", cellular());
        Solved s = solve_problem(spec, 0.0);
        OperatorMatrix t = assemble_advection(spec.coefficients(0.0), spec.bc);
        SensitivityField sf = solve_sensitivity(s.pair, s.m, t);
        CHECK(std::fabs(second_derivative_at_zero(s.pair, sf, spec.coefficients(0.0), spec.bc)) <=
              1e-9);
    }
    SUBCASE("P1 closed form: lambda'' = 1/2") {
        ProblemSpec spec = make_problem(line(513), 1.0, "1", "0", constant1d(1.0));
        Solved s = solve_problem(spec, 0.0);
        OperatorMatrix t = assemble_advection(spec.coefficients(0.0), spec.bc);
        SensitivityField sf = solve_sensitivity(s.pair, s.m, t);
        const double val = second_derivative_at_zero(s.pair, sf, spec.coefficients(0.0), spec.bc);
        CHECK(std::fabs(val - 0.5) / 0.5 <= 0.02);
    }
}

TEST_CASE("cone certificates") {
    Setup st = neumann_cellular(33, 2.0);
    SUBCASE("interior sign change is rejected") {
        ScalarField bad = st.solved.pair.u;
        bad[st.spec.grid->index(16, 16)] = -1.0;
        CHECK_THROWS_AS(make_cone_element(bad, st.spec.bc, st.spec.a), Error);
    }
    SUBCASE("Dirichlet cone wants vanishing boundary values") {
        ProblemSpec spec = make_problem(line(65), 1.0, "1", "0", FlowSpec{});
        Solved s = solve_problem(spec, 0.0);
        ScalarField shifted = s.pair.u;
        for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += 0.5;
        CHECK_THROWS_AS(make_cone_element(shifted, spec.bc, spec.a), Error);
        // the eigenfunction itself is admissible with positive inward slope
        ConeElement eu = make_cone_element(s.pair.u, spec.bc, spec.a);
        CHECK(eu.min_inward_slope > 0.0);
    }
    SUBCASE("multiplicative perturbations keep a small bc defect") {
        std::mt19937_64 rng(3);
        ScalarField phi = random_cos_field(*st.spec.grid, rng, 2);
        ConeElement omega = cone_perturb(st.solved.pair, phi, 0.1, st.spec.bc, st.spec.a);
        CHECK(omega.bc_residual <= 1e-2);
    }
}
