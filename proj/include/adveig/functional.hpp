#pragma once
// The functional J(w) = int u v (L w / w) over the positive cone, the
// decomposition/antisymmetry identities it satisfies, the eigenvalue
// derivative in the advection amplitude, the sensitivity field u' = du/dA,
// and the second-derivative formula at A = 0.

#include <random>

#include "adveig/assembly.hpp"
#include "adveig/eigensolver.hpp"
#include "adveig/mesh.hpp"

namespace adveig {

struct ConeElement {
    ScalarField omega;
    double b = 0.0;           // which cone the certificate was checked against
    double bc_residual = 0.0;  // max boundary-condition defect of omega
    double min_inward_slope = 0.0;  // b = 1 only
};

// Validates positivity (interior nodes; for b = 1 also omega = 0 on the
// boundary with positive inward slope) and records the boundary-condition
// defect. Throws Error("ConeViolation") for hard violations.
ConeElement make_cone_element(const ScalarField& omega, const BoundaryCondition& bc,
                              const ScalarField& a);

// omega = u * exp(t * phi). With (a grad phi).n = 0 the product satisfies
// the same boundary condition as u for every t.
ConeElement cone_perturb(const EigenPair& pair, const ScalarField& phi, double t,
                         const BoundaryCondition& bc, const ScalarField& a);

// Smooth random field with zero normal derivative (sums of cosine modes);
// the admissible multiplicative directions used by the identity suites.
ScalarField random_cos_field(const Grid& grid, std::mt19937_64& rng, int max_mode = 3);

// Quadrature of u v (M omega / omega); for Dirichlet operators the boundary
// nodes contribute zero (u v / omega extends by 0 there).
double eval_J(const ConeElement& omega, const EigenPair& pair, const OperatorMatrix& m);

// |J(u) - J(omega) - int u v a |grad log(omega/u)|^2| / (1 + |J(u)|).
double lemma2_residual(const ConeElement& omega, const EigenPair& pair, const OperatorMatrix& m,
                       const ScalarField& a);

// |<Mu,v> - <u,Mv> - int u v a |grad log(v/u)|^2| / (1 + |lambda|), the
// antisymmetry identity; <u,Mv> applies the forward operator to v.
double corollary_residual(const EigenPair& pair, const OperatorMatrix& m, const ScalarField& a);

// d(lambda)/dA = int v (V . grad u) evaluated through the operator's own
// advection block T (the exact derivative of the discrete eigenvalue).
double derivative_by_formula(const EigenPair& pair, const OperatorMatrix& advection);

struct SensitivityField {
    ScalarField du;               // du/dA with int u' u = 0
    double lambda_prime = 0.0;
    double ortho_residual = 0.0;  // |int u' u|
    double equation_residual = 0.0;
};

// Solves the bordered system [(M - lambda I) u' + mu W v = lambda' u - T u;
// <u,u'>_W = 0]; the border removes the one-dimensional kernel exactly.
// Throws Error("BorderedSolveFailure") if the residuals do not close.
SensitivityField solve_sensitivity(const EigenPair& pair, const OperatorMatrix& m,
                                   const OperatorMatrix& advection);

// 2 [ kappa oint u'^2 + int a |grad u'|^2 + int c u'^2 - lambda0 int u'^2 ];
// the kappa boundary term is dropped for Dirichlet.
double second_derivative_at_zero(const EigenPair& pair0, const SensitivityField& sens,
                                 const CoefficientSet& coeffs, const BoundaryCondition& bc);

}  // namespace adveig
