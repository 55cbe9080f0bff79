#include "adveig/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "adveig/errors.hpp"
#include "adveig/kernels.hpp"

namespace adveig {

CoefficientSet ProblemSpec::coefficients(double amplitude) const {
    CoefficientSet cs;
    cs.grid = grid.get();
    cs.a = a;
    cs.c = c;
    cs.flow = flow;
    cs.amplitude = amplitude;
    return cs;
}

ProblemSpec make_problem(const GridSpec& gs, double b, const std::string& a_expr,
                         const std::string& c_expr, const FlowSpec& flow_spec,
                         SolverOptions solver) {
    ProblemSpec spec;
    spec.grid = std::make_shared<const Grid>(Grid::build(gs));
    spec.bc = BoundaryCondition{b};
    spec.bc.validate();
    spec.a = ScalarField::from_expr(*spec.grid, a_expr);
    spec.c = ScalarField::from_expr(*spec.grid, c_expr);
    spec.flow_spec = flow_spec;
    spec.flow = realize(flow_spec, *spec.grid);
    spec.solver = solver;
    return spec;
}

Solved solve_problem(const ProblemSpec& spec, double amplitude) {
    Solved s;
    CoefficientSet coeffs = spec.coefficients(amplitude);
    s.m = assemble(coeffs, spec.bc);
    s.m_adj = assemble_adjoint(coeffs, spec.bc);
    s.pair = principal_eigenpair(s.m, s.m_adj, spec.solver);
    return s;
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::StrictlyIncreasing: return "strictly-increasing";
        case Classification::Flat: return "flat";
        case Classification::NonMonotone: return "non-monotone";
    }
    return "?";
}

namespace {

int resolve_threads(int requested, std::size_t jobs) {
    int t = requested;
    if (t <= 0) {
        if (const char* env = std::getenv("ADVEIG_THREADS")) t = std::atoi(env);
    }
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return std::min<int>(t, static_cast<int>(jobs ? jobs : 1));
}

template <typename Fn>
void parallel_for(std::size_t jobs, int threads, Fn&& fn) {
    if (threads <= 1 || jobs <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

double forward_lambda(const ProblemSpec& spec, double amplitude) {
    return principal_lambda(assemble(spec.coefficients(amplitude), spec.bc), spec.solver);
}

}  // namespace

SweepReport sweep(const ProblemSpec& spec, const std::vector<double>& amplitudes,
                  const SweepOptions& opts) {
    for (std::size_t i = 0; i + 1 < amplitudes.size(); ++i)
        if (!(amplitudes[i] < amplitudes[i + 1]))
            raise("BadAmplitudeSchedule", "amplitudes must be strictly increasing");
    if (!amplitudes.empty() && amplitudes.front() < 0.0)
        raise("BadAmplitudeSchedule", "amplitudes must be nonnegative");

    SweepReport report;
    report.rows.resize(amplitudes.size());

    OperatorMatrix advection = assemble_advection(spec.coefficients(0.0), spec.bc);

    const int threads = resolve_threads(opts.threads, amplitudes.size());
    parallel_for(amplitudes.size(), threads, [&](std::size_t i) {
        SweepRow& row = report.rows[i];
        row.amplitude = amplitudes[i];
        try {
            Solved s = solve_problem(spec, row.amplitude);
            row.lambda = s.pair.lambda;
            row.residual = std::max(s.pair.residual_u, s.pair.residual_v);
            row.positivity = s.pair.positivity_ok;
            if (opts.derivatives) {
                row.dlam_formula = derivative_by_formula(s.pair, advection);
                const double d = opts.fd_delta;
                const double lp = forward_lambda(spec, row.amplitude + d);
                const double lm = forward_lambda(spec, row.amplitude - d);
                row.dlam_central = (lp - lm) / (2.0 * d);
                row.has_derivatives = true;
            }
        } catch (const Error& e) {
            row.failed = true;
            row.error = e.kind();
        }
    });

    EigenPair u0 = solve_problem(spec, 0.0).pair;
    classify(report, u0, spec);
    return report;
}

void classify(SweepReport& report, const EigenPair& u0, const ProblemSpec& spec) {
    const VectorField& vel = spec.flow.velocity;
    report.div_residual = divergence_residual(vel);
    report.flux_residual = normal_flux_residual(vel);
    report.compliant = is_compliant(vel, spec.bc.is_dirichlet());
    report.lambda0 = u0.lambda;

    VectorField gu = grad(u0.u);
    double indicator = 0.0, grad_norm = 0.0;
    for (std::size_t i = 0; i < u0.u.size(); ++i) {
        double s = vel.comp(0)[i] * gu.comp(0)[i];
        double gn = std::fabs(gu.comp(0)[i]);
        if (vel.dim() == 2) {
            s += vel.comp(1)[i] * gu.comp(1)[i];
            gn = std::max(gn, std::fabs(gu.comp(1)[i]));
        }
        indicator = std::max(indicator, std::fabs(s));
        grad_norm = std::max(grad_norm, gn);
    }
    report.first_integral_indicator = indicator;

    const double tol_fi = 1e-8 * (1.0 + spec.flow.max_speed()) * std::max(1.0, grad_norm);
    const double tol_flat = 1e-7;
    const bool expect_flat = indicator <= tol_fi;

    std::vector<double> lams;
    for (const SweepRow& r : report.rows)
        if (!r.failed) lams.push_back(r.lambda);

    bool data_nonmonotone = false;
    double max_dev = 0.0, total = 0.0;
    for (std::size_t k = 0; k + 1 < lams.size(); ++k)
        if (lams[k + 1] - lams[k] < -1e-8) data_nonmonotone = true;
    if (!lams.empty()) total = lams.back() - lams.front();
    for (double l : lams) max_dev = std::max(max_dev, std::fabs(l - u0.lambda));

    if (max_dev <= tol_flat)
        report.classification = Classification::Flat;
    else if (data_nonmonotone)
        report.classification = Classification::NonMonotone;
    else
        report.classification = Classification::StrictlyIncreasing;

    bool ok;
    if (expect_flat) {
        report.flat_ok = max_dev <= tol_flat;
        ok = report.flat_ok;
    } else {
        report.monotone_ok = !data_nonmonotone && total > 0.0;
        ok = report.monotone_ok;
    }
    report.regime = ok ? "theorem-consistent"
                       : (report.compliant ? "discretization-failure" : "counterexample-regime");
}

FirstIntegralFamily build_first_integral_family(const ProblemSpec& spec, int degree) {
    const Grid& g = *spec.grid;
    FirstIntegralFamily fam;
    if (spec.flow.kind != FlowKind::StreamFunction) {
        fam.fields.emplace_back(g, 1.0);
        fam.gradients.emplace_back(g, 0.0);
        fam.membership_residual = 0.0;
        return fam;
    }

    const ScalarField& psi = spec.flow.psi;
    VectorField gpsi = grad(psi);
    // V . grad psi with V = (d psi/dy, -d psi/dx) cancels termwise.
    std::vector<double> vdot(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i)
        vdot[i] = spec.flow.velocity.comp(0)[i] * gpsi.comp(0)[i] +
                  spec.flow.velocity.comp(1)[i] * gpsi.comp(1)[i];

    const bool dirichlet = spec.bc.is_dirichlet();
    if (dirichlet) {
        double scale = kernels::max_abs(psi.data(), psi.size());
        for (std::size_t i = 0; i < g.node_count(); ++i)
            if (g.is_boundary(i) && std::fabs(psi[i]) > 1e-10 * std::max(1.0, scale))
                raise("BadFirstIntegralFamily",
                      "b = 1 needs a stream function vanishing on the boundary");
    }

    const int kmin = dirichlet ? 1 : 0;
    for (int k = kmin; k <= degree; ++k) {
        ScalarField f(g, 1.0);
        VectorField gf(g, 0.0);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const double pk = std::pow(psi[i], k);
            const double dpk = k == 0 ? 0.0 : k * std::pow(psi[i], k - 1);
            f[i] = pk;
            gf.comp(0)[i] = dpk * gpsi.comp(0)[i];
            gf.comp(1)[i] = dpk * gpsi.comp(1)[i];
            fam.membership_residual = std::max(fam.membership_residual, std::fabs(dpk * vdot[i]));
        }
        fam.fields.push_back(std::move(f));
        fam.gradients.push_back(std::move(gf));
    }
    return fam;
}

double first_integral_bound(const ProblemSpec& spec, const FirstIntegralFamily& fam) {
    const Grid& g = *spec.grid;
    const int K = static_cast<int>(fam.fields.size());
    if (K == 0) raise("SingularMass", "empty first-integral family");
    const double kappa = spec.bc.is_dirichlet() ? 0.0 : spec.bc.kappa();

    Eigen::MatrixXd G(K, K), B(K, K);
    ScalarField prod(g);
    for (int k = 0; k < K; ++k)
        for (int l = k; l < K; ++l) {
            const ScalarField& fk = fam.fields[k];
            const ScalarField& fl = fam.fields[l];
            double quot = 0.0, mass = 0.0, bnd = 0.0;
            const auto& w = g.weights();
            const auto& bw = g.boundary_weights();
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                const double p = fk[i] * fl[i];
                double gg = fam.gradients[k].comp(0)[i] * fam.gradients[l].comp(0)[i];
                if (g.dim() == 2)
                    gg += fam.gradients[k].comp(1)[i] * fam.gradients[l].comp(1)[i];
                quot += w[i] * (spec.a[i] * gg + spec.c[i] * p);
                mass += w[i] * p;
                if (bw[i] != 0.0) bnd += bw[i] * p;
            }
            G(k, l) = G(l, k) = quot + kappa * bnd;
            B(k, l) = B(l, k) = mass;
        }

    // Orthonormalize against the mass Gram, dropping degenerate directions.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esB(B);
    const double bmax = esB.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<int> keep;
    for (int j = 0; j < K; ++j)
        if (esB.eigenvalues()[j] > 1e-13 * bmax) keep.push_back(j);
    if (keep.empty()) raise("SingularMass", "first-integral mass Gram is degenerate");
    Eigen::MatrixXd Z(K, static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        Z.col(static_cast<int>(j)) =
            esB.eigenvectors().col(keep[j]) / std::sqrt(esB.eigenvalues()[keep[j]]);
    Eigen::MatrixXd Gt = Z.transpose() * G * Z;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esG(Gt);
    return esG.eigenvalues().minCoeff();
}

MinmaxReport minmax_verify(const ProblemSpec& spec, double amplitude) {
    Solved s = solve_problem(spec, amplitude);
    const EigenPair& pair = s.pair;
    const Grid& g = *spec.grid;
    const auto& w = g.weights();
    const bool dirichlet = spec.bc.is_dirichlet();

    MinmaxReport rep;
    rep.lambda = pair.lambda;
    rep.tol = 1e-5 * (1.0 + std::fabs(pair.lambda));

    // Pointwise eigen-ratio (Lu)_x / u_x; Dirichlet boundary rows excluded.
    ScalarField mu = apply(s.m, pair.u);
    std::vector<double> ratio(g.node_count(), 0.0);
    std::vector<bool> included(g.node_count(), true);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (dirichlet && g.is_boundary(i)) {
            included[i] = false;
            continue;
        }
        ratio[i] = mu[i] / pair.u[i];
    }

    std::mt19937_64 rng(0xadc0c473ULL);

    // (a) scan J(u e^{t phi}) over t for random admissible directions.
    const double step = rep.scan_step;
    for (int dir = 0; dir < 5; ++dir) {
        ScalarField phi = random_cos_field(g, rng);
        double best_j = -1e300, best_t = 0.0;
        for (int k = -20; k <= 20; ++k) {
            const double t = k * step;
            ConeElement omega = cone_perturb(pair, phi, t, spec.bc, spec.a);
            const double j = eval_J(omega, pair, s.m);
            if (j > best_j + 1e-13 * (1.0 + std::fabs(j)) ||
                (std::fabs(j - best_j) <= 1e-13 * (1.0 + std::fabs(j)) &&
                 std::fabs(t) < std::fabs(best_t))) {
                best_j = j;
                best_t = t;
            }
        }
        rep.worst_peak_offset = std::max(rep.worst_peak_offset, std::fabs(best_t));
        rep.worst_peak_gap = std::max(rep.worst_peak_gap, std::fabs(best_j - pair.lambda));
    }
    rep.pass_peak = rep.worst_peak_offset <= step + 1e-12 && rep.worst_peak_gap <= rep.tol;

    // (b) int p^2 (Lu/u) for random admissible unit-mass weights p.
    for (int k = 0; k < 5; ++k) {
        ScalarField phi = random_cos_field(g, rng);
        ScalarField p(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const double base = dirichlet ? pair.u[i] : 1.0;
            p[i] = base * std::exp(0.3 * phi[i]);
        }
        const double mass = kernels::dot3(w.data(), p.data(), p.data(), p.size());
        kernels::scale(p.data(), 1.0 / std::sqrt(mass), p.size());
        double val = 0.0;
        for (std::size_t i = 0; i < g.node_count(); ++i)
            if (included[i]) val += w[i] * p[i] * p[i] * ratio[i];
        rep.weight_gap = std::max(rep.weight_gap, std::fabs(val - pair.lambda));
    }
    rep.pass_weight = rep.weight_gap <= rep.tol;

    // (c) Protter-Weinberger at omega = u: the ratio is constant.
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (included[i])
            rep.ratio_spread = std::max(rep.ratio_spread, std::fabs(ratio[i] - pair.lambda));
    rep.pass_ratio = rep.ratio_spread <= rep.tol;
    return rep;
}

LimitReport limit_probe(const ProblemSpec& spec, double a_max, double tol_limit, int degree) {
    if (spec.bc.is_dirichlet())
        raise("NonCompliantFlow", "limit probe is defined for 0 <= b < 1");
    if (!is_compliant(spec.flow.velocity, false))
        raise("NonCompliantFlow",
              "flow violates div V = 0 or V.n = 0; route this problem to counterexample_probe");

    LimitReport rep;
    rep.amplitudes.push_back(0.0);
    for (double a = 1.0; a < a_max; a *= 2.0) rep.amplitudes.push_back(a);
    if (rep.amplitudes.back() < a_max) rep.amplitudes.push_back(a_max);

    rep.lambdas.resize(rep.amplitudes.size());
    const int threads = resolve_threads(0, rep.amplitudes.size());
    parallel_for(rep.amplitudes.size(), threads, [&](std::size_t i) {
        rep.lambdas[i] = solve_problem(spec, rep.amplitudes[i]).pair.lambda;
    });

    rep.limit_estimate = rep.lambdas.back();
    rep.monotone_ok = true;
    for (std::size_t i = 0; i + 1 < rep.lambdas.size(); ++i)
        if (rep.lambdas[i + 1] - rep.lambdas[i] < -1e-8) rep.monotone_ok = false;
    const std::size_t n = rep.lambdas.size();
    rep.cauchy = n >= 3 && std::fabs(rep.lambdas[n - 1] - rep.lambdas[n - 2]) <= tol_limit &&
                 std::fabs(rep.lambdas[n - 2] - rep.lambdas[n - 3]) <= tol_limit;

    rep.bound = first_integral_bound(spec, build_first_integral_family(spec, degree));
    rep.within_bound = true;
    for (double l : rep.lambdas)
        if (l > rep.bound + 1e-6) rep.within_bound = false;
    rep.gap = rep.bound - rep.limit_estimate;
    return rep;
}

CounterexampleReport counterexample_probe(const ProblemSpec& spec, double a_large, double delta) {
    const Grid& g = *spec.grid;
    if (g.dim() != 1) raise("DimensionMismatch", "counterexample probe is 1D");
    if (spec.bc.b != 0.0) raise("ConfigError", "counterexample probe needs Neumann bc");
    if (spec.flow.kind != FlowKind::Constant)
        raise("ConfigError", "counterexample probe needs the constant flow V = 1");
    const double cr = spec.c[g.node_count() - 1] - spec.c[0];
    bool nondecreasing = true;
    for (std::size_t i = 0; i + 1 < g.node_count(); ++i)
        if (spec.c[i + 1] - spec.c[i] < -1e-12 * std::max(1.0, std::fabs(cr)))
            nondecreasing = false;
    if (!nondecreasing || !(cr > 1e-12))
        raise("ConfigError", "counterexample probe needs nondecreasing nonconstant c");
    if (g.hx() > 1.0 / (4.0 * a_large))
        raise("UnresolvedLayer", "grid spacing exceeds 1/(4 A); refine the grid");

    CounterexampleReport rep;
    rep.lambda0 = solve_problem(spec, 0.0).pair.lambda;
    rep.lambda_large = solve_problem(spec, a_large).pair.lambda;
    rep.c_at_0 = spec.c[0];
    rep.flux_residual = normal_flux_residual(spec.flow.velocity);
    rep.decreased = rep.lambda_large < rep.lambda0;
    rep.near_limit = rep.lambda_large <= rep.c_at_0 + delta;
    return rep;
}

SweepReport gradient_flow_sweep(const ProblemSpec& spec, const std::vector<double>& amplitudes,
                                const SweepOptions& opts) {
    if (spec.flow.kind != FlowKind::Gradient)
        raise("ConfigError", "gradient_flow_sweep needs a gradient flow V = grad m");
    SweepReport report = sweep(spec, amplitudes, opts);

    const Grid& g = *spec.grid;
    const VectorField& gm = spec.flow.velocity;  // grad m
    ScalarField speed2(g), lap(g);
    {
        ScalarField d1 = partial(ScalarField(g, gm.comp(0)), 0);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            double s2 = gm.comp(0)[i] * gm.comp(0)[i];
            lap[i] = d1[i];
            if (g.dim() == 2) s2 += gm.comp(1)[i] * gm.comp(1)[i];
            speed2[i] = s2;
        }
        if (g.dim() == 2) {
            ScalarField d2 = partial(ScalarField(g, gm.comp(1)), 1);
            for (std::size_t i = 0; i < g.node_count(); ++i) lap[i] += d2[i];
        }
    }

    report.lambda_sym.assign(report.rows.size(), std::nan(""));
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const SweepRow& row = report.rows[i];
        if (row.failed) {
            report.sym_ok = false;
            continue;
        }
        const double A = row.amplitude;
        CoefficientSet cs;
        cs.grid = spec.grid.get();
        cs.a = spec.a;
        ScalarField pot(g);
        for (std::size_t k = 0; k < g.node_count(); ++k)
            pot[k] = 0.25 * A * A * speed2[k] - 0.5 * A * lap[k] + spec.c[k];
        cs.c = std::move(pot);
        cs.amplitude = 0.0;
        const double lsym = principal_lambda(assemble(cs, spec.bc), spec.solver);
        report.lambda_sym[i] = lsym;
        if (std::fabs(lsym - row.lambda) > 1e-6 * (1.0 + std::fabs(row.lambda)))
            report.sym_ok = false;
    }
    return report;
}

ScalingCheck scaling_identity_check(const ProblemSpec& spec, double amplitude, double factor,
                                    double tol) {
    ScalingCheck chk;
    chk.amplitude = amplitude;
    chk.factor = factor;
    OperatorMatrix ma = assemble(spec.coefficients(amplitude), spec.bc);
    OperatorMatrix m0 = assemble(spec.coefficients(0.0), spec.bc);
    OperatorMatrix lb = combine(factor, ma, 1.0 - factor, m0);
    chk.lambda_combined = principal_lambda(lb, spec.solver);
    chk.lambda_direct = forward_lambda(spec, amplitude * factor);
    chk.diff = std::fabs(chk.lambda_combined - chk.lambda_direct);
    chk.pass = chk.diff <= tol;
    return chk;
}

std::pair<double, double> symmetry_check(const ProblemSpec& spec, double amplitude) {
    return {forward_lambda(spec, amplitude), forward_lambda(spec, -amplitude)};
}

}  // namespace adveig
