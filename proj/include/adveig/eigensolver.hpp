#pragma once
// Principal eigenpairs of the assembled operator and its adjoint by shifted
// inverse power iteration: one sparse LU of (M - sigma*I) with sigma below
// the Gershgorin lower bound, then z <- solve(z)/||z||_W until the Rayleigh
// quotient settles. The Rayleigh quotient and all norms use the trapezoid
// quadrature inner product.

#include "adveig/assembly.hpp"
#include "adveig/mesh.hpp"

namespace adveig {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 500;
    bool has_shift = false;
    double shift = 0.0;
};

struct EigenPair {
    double lambda = 0.0;
    ScalarField u;  // forward eigenfunction, int u^2 = 1
    ScalarField v;  // adjoint eigenfunction, int u v = 1
    double residual_u = 0.0;
    double residual_v = 0.0;
    int iterations = 0;
    bool positivity_ok = false;
    bool peclet_warning = false;
    // Eigenvalue of the V-flipped assembly. Cross-checked against lambda
    // (within 10*tol) for compliant flows; for V.n != 0 the flipped
    // operator is a genuinely different problem and the two may differ.
    double lambda_adjoint = 0.0;
};

// Throws Error with kind NoConvergence, PositivityFailure or SingularShift.
EigenPair principal_eigenpair(const OperatorMatrix& m, const OperatorMatrix& m_adj,
                              const SolverOptions& opts = {});

// Forward iteration only; used where just the eigenvalue is needed
// (finite-difference derivative probes, scaling checks).
double principal_lambda(const OperatorMatrix& m, const SolverOptions& opts = {});

// Scales u to int u^2 = 1, then v to int u v = 1.
// Throws Error("DegeneratePair") if int u v <= 0.
void normalize_pair(ScalarField& u, ScalarField& v);

// ||M z - lambda z||_W / ||z||_W.
double relative_residual(const OperatorMatrix& m, const ScalarField& z, double lambda);
// Max of the forward and adjoint relative residuals of a pair.
double eigen_residual(const OperatorMatrix& m, const OperatorMatrix& m_adj, const EigenPair& pair);

// min over rows of (diag - sum |offdiag|); the default shift is this - 1.
double gershgorin_lower_bound(const OperatorMatrix& m);

}  // namespace adveig
