#include "adveig/eigensolver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <vector>

#include "adveig/errors.hpp"
#include "adveig/kernels.hpp"

namespace adveig {

namespace {

Eigen::SparseMatrix<double> to_eigen_shifted(const OperatorMatrix& m, double sigma) {
    const std::size_t n = m.rows();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m.col().size());
    for (std::size_t r = 0; r < n; ++r)
        for (std::int32_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
            double v = m.values()[k];
            if (m.col()[k] == static_cast<std::int32_t>(r)) v -= sigma;
            trips.emplace_back(static_cast<int>(r), m.col()[k], v);
        }
    Eigen::SparseMatrix<double> out(static_cast<int>(n), static_cast<int>(n));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

struct IterationResult {
    double lambda = 0.0;
    std::vector<double> z;
    int iterations = 0;
    double residual = 0.0;
};

double mat_inf_norm(const OperatorMatrix& m) {
    double worst = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double s = 0.0;
        for (std::int32_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k)
            s += std::fabs(m.values()[k]);
        worst = std::max(worst, s);
    }
    return worst;
}

IterationResult inverse_power(const OperatorMatrix& m, double sigma, const SolverOptions& opts) {
    const std::size_t n = m.rows();
    const auto& w = m.grid().weights();
    // Rounding floor of the residual: ||M||_inf ulps survive in M*z however
    // converged z is, so the residual gate must not demand less.
    const double floor = 2.0 * 2.2e-16 * mat_inf_norm(m);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::SparseMatrix<double> shifted;
    {
        int attempts = 0;
        double s = sigma;
        for (;;) {
            shifted = to_eigen_shifted(m, s);
            lu.compute(shifted);
            if (lu.info() == Eigen::Success) break;
            if (++attempts > 3) raise("SingularShift", "LU of (M - sigma I) failed repeatedly");
            s -= 0.5 * (1.0 + std::fabs(s));  // retry with a perturbed shift
        }
    }

    // Positive start; for Dirichlet the boundary entries start (and stay)
    // at zero, which keeps the iteration inside the interior block and away
    // from the spurious unit eigenvalues of the identity rows.
    Eigen::VectorXd z = Eigen::VectorXd::Ones(static_cast<int>(n));
    const bool dirichlet = m.bc_b() == 1.0;
    if (dirichlet)
        for (std::size_t i = 0; i < n; ++i)
            if (m.grid().is_boundary(i)) z[static_cast<int>(i)] = 0.0;

    std::vector<double> mz(n);
    double lambda = 0.0, lambda_prev = 0.0;
    double residual = 0.0;
    double best_residual = 0.0;
    int stagnant = 0;
    int it = 0;
    bool converged = false;
    for (it = 1; it <= opts.max_iter; ++it) {
        // One step of iterative refinement per solve: the factorization's
        // rounding otherwise floors the pointwise eigen-ratio near Dirichlet
        // boundaries around 1e-4 scale.
        Eigen::VectorXd rhs = z;
        z = lu.solve(rhs);
        rhs -= shifted * z;
        z += lu.solve(rhs);
        if (dirichlet)
            for (std::size_t i = 0; i < n; ++i)
                if (m.grid().is_boundary(i)) z[static_cast<int>(i)] = 0.0;
        const double nrm = std::sqrt(kernels::dot3(w.data(), z.data(), z.data(), n));
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            raise("NoConvergence", "inverse iteration produced a degenerate vector");
        for (std::size_t i = 0; i < n; ++i) z[static_cast<int>(i)] /= nrm;

        kernels::spmv(m.view(), z.data(), mz.data());
        lambda = kernels::dot3(w.data(), z.data(), mz.data(), n);
        double rr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ri = mz[i] - lambda * z[static_cast<int>(i)];
            rr += w[i] * ri * ri;
        }
        residual = std::sqrt(rr);
        // Track stagnation: once the residual stops improving it has reached
        // its floating-point floor and demanding more is meaningless.
        if (it == 1 || residual < 0.7 * best_residual) {
            best_residual = it == 1 ? residual : std::min(best_residual, residual);
            stagnant = 0;
        } else {
            best_residual = std::min(best_residual, residual);
            ++stagnant;
        }
        const bool residual_ok =
            residual <= 100.0 * opts.tol * (1.0 + std::fabs(lambda)) + floor || stagnant >= 6;
        if (it > 1 && std::fabs(lambda - lambda_prev) <= opts.tol * (1.0 + std::fabs(lambda)) &&
            residual_ok) {
            converged = true;
            break;
        }
        lambda_prev = lambda;
    }
    if (!converged)
        raise("NoConvergence", "inverse iteration did not converge in " +
                                   std::to_string(opts.max_iter) + " iterations");

    IterationResult out;
    out.lambda = lambda;
    out.z.assign(z.data(), z.data() + n);
    out.iterations = it;
    out.residual = residual;
    return out;
}

void sign_fix_positive(std::vector<double>& z, const Grid& g) {
    double mass = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) mass += g.weights()[i] * z[i];
    if (mass < 0.0)
        for (double& v : z) v = -v;
}

bool interior_positive(const std::vector<double>& z, const Grid& g) {
    for (std::size_t i = 0; i < z.size(); ++i)
        if (!g.is_boundary(i) && !(z[i] > 0.0)) return false;
    return true;
}

}  // namespace

double gershgorin_lower_bound(const OperatorMatrix& m) {
    double lo = 0.0;
    bool first = true;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double diag = 0.0, radius = 0.0;
        for (std::int32_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
            if (m.col()[k] == static_cast<std::int32_t>(r))
                diag = m.values()[k];
            else
                radius += std::fabs(m.values()[k]);
        }
        const double b = diag - radius;
        if (first || b < lo) lo = b;
        first = false;
    }
    return lo;
}

namespace {

// Default shift: below the whole spectrum. The Gershgorin bound of the full
// matrix degrades linearly in the advection amplitude, while the bound from
// the symmetric block alone stays sharp (real parts of the spectrum cannot
// drop below the symmetric part); take the better of the two.
double default_shift(const OperatorMatrix& m) {
    return std::max(gershgorin_lower_bound(m), m.symmetric_gershgorin()) - 1.0;
}

}  // namespace

EigenPair principal_eigenpair(const OperatorMatrix& m, const OperatorMatrix& m_adj,
                              const SolverOptions& opts) {
    if (m.rows() != m_adj.rows()) raise("DimensionMismatch", "forward/adjoint size mismatch");
    const double sigma =
        opts.has_shift ? opts.shift : std::min(default_shift(m), default_shift(m_adj));

    IterationResult fwd = inverse_power(m, sigma, opts);
    IterationResult adj = inverse_power(m_adj, sigma, opts);

    if (m.flow_compliant() &&
        std::fabs(fwd.lambda - adj.lambda) > 10.0 * opts.tol * (1.0 + std::fabs(fwd.lambda)))
        raise("NoConvergence", "forward and adjoint eigenvalues disagree beyond 10*tol");

    const Grid& g = m.grid();
    sign_fix_positive(fwd.z, g);
    sign_fix_positive(adj.z, g);
    if (!interior_positive(fwd.z, g) || !interior_positive(adj.z, g))
        raise("PositivityFailure",
              m.peclet_warning()
                  ? "eigenvector changes sign at interior nodes (grid Peclet > 1)"
                  : "eigenvector changes sign at interior nodes");

    EigenPair pair;
    pair.u = ScalarField(g, std::move(fwd.z));
    pair.v = ScalarField(g, std::move(adj.z));
    normalize_pair(pair.u, pair.v);
    pair.lambda = fwd.lambda;
    pair.lambda_adjoint = adj.lambda;
    pair.iterations = std::max(fwd.iterations, adj.iterations);
    pair.residual_u = relative_residual(m, pair.u, pair.lambda);
    pair.residual_v = relative_residual(m_adj, pair.v, pair.lambda_adjoint);
    pair.positivity_ok = true;
    pair.peclet_warning = m.peclet_warning() || m_adj.peclet_warning();
    return pair;
}

double principal_lambda(const OperatorMatrix& m, const SolverOptions& opts) {
    const double sigma = opts.has_shift ? opts.shift : default_shift(m);
    return inverse_power(m, sigma, opts).lambda;
}

void normalize_pair(ScalarField& u, ScalarField& v) {
    const auto& w = u.grid().weights();
    const std::size_t n = u.size();
    const double uu = kernels::dot3(w.data(), u.data(), u.data(), n);
    if (!(uu > 0.0)) raise("DegeneratePair", "int u^2 <= 0");
    kernels::scale(u.data(), 1.0 / std::sqrt(uu), n);
    const double uv = kernels::dot3(w.data(), u.data(), v.data(), n);
    if (!(uv > 0.0)) raise("DegeneratePair", "int u*v <= 0 for a positive pair");
    kernels::scale(v.data(), 1.0 / uv, n);
}

double relative_residual(const OperatorMatrix& m, const ScalarField& z, double lambda) {
    const auto& w = m.grid().weights();
    const std::size_t n = z.size();
    std::vector<double> mz(n);
    kernels::spmv(m.view(), z.data(), mz.data());
    double rr = 0.0, zz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ri = mz[i] - lambda * z[i];
        rr += w[i] * ri * ri;
        zz += w[i] * z[i] * z[i];
    }
    return std::sqrt(rr / zz);
}

double eigen_residual(const OperatorMatrix& m, const OperatorMatrix& m_adj, const EigenPair& pair) {
    return std::max(relative_residual(m, pair.u, pair.lambda),
                    relative_residual(m_adj, pair.v, pair.lambda_adjoint));
}

}  // namespace adveig
