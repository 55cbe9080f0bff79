#pragma once
// Sparse finite-difference assembly of L_A = -div(a grad .) + A V.grad .
// + c(x) and of its formal adjoint (V replaced by -V) on the vertex grid,
// for Dirichlet (b = 1), Robin (0 < b < 1) and Neumann (b = 0) boundary
// conditions.
//
// Layout and algebra, with W the diagonal of trapezoid weights:
//   * diffusion is in flux form (face coefficients are arithmetic means);
//     W*(diffusion + c) is exactly symmetric, boundary rows included
//     (Dirichlet boundary rows are identity rows instead);
//   * advection is the centered skew form assembled from antisymmetric face
//     fluxes plus a boundary wall-flux diagonal E and the diagonal
//     correction -(1/2) div_h V.  Stream-function flows use fluxes built
//     from the interpolated stream function, so the fluxes around every
//     dual cell telescope to zero exactly.  Consequences used everywhere
//     downstream: W*T + T^t*W = E - W*diag(div_h V), constants are
//     annihilated up to rounding whenever div_h V = 0, and for tangential
//     divergence-free flows (or Dirichlet rows removed) the adjoint
//     assembly equals W^-1 M^t W to machine precision.

#include <cstdint>
#include <string>
#include <vector>

#include "adveig/flows.hpp"
#include "adveig/kernels.hpp"
#include "adveig/mesh.hpp"

namespace adveig {

struct BoundaryCondition {
    double b = 0.0;  // in [0,1]

    static BoundaryCondition dirichlet() { return {1.0}; }
    static BoundaryCondition neumann() { return {0.0}; }
    static BoundaryCondition robin(double b);

    bool is_dirichlet() const { return b == 1.0; }
    // kappa = b/(1-b), the Robin coefficient in (a grad u).n + kappa u = 0.
    double kappa() const { return b / (1.0 - b); }
    void validate() const;
};

struct CoefficientSet {
    const Grid* grid = nullptr;
    ScalarField a;  // isotropic diffusion a(x) > 0
    ScalarField c;
    Flow flow;
    double amplitude = 0.0;  // A

    const VectorField& velocity() const { return flow.velocity; }
    void validate() const;  // throws EllipticityViolated etc.
};

class OperatorMatrix {
  public:
    std::size_t rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
    const Grid& grid() const { return *grid_; }
    bool is_adjoint() const { return adjoint_; }
    bool peclet_warning() const { return peclet_warning_; }
    double amplitude() const { return amplitude_; }
    double bc_b() const { return bc_b_; }
    // True when the flow satisfied div V = 0 and (b = 1 or V.n = 0) at
    // assembly time; only then is the V-flipped assembly the W-adjoint.
    bool flow_compliant() const { return flow_compliant_; }
    // Gershgorin lower bound of the diffusion + c block alone. Eigenvalue
    // real parts never drop below the symmetric part's spectrum, so this
    // stays a valid shift target however large the advection amplitude is.
    double symmetric_gershgorin() const { return sym_gershgorin_; }

    kernels::CsrView view() const {
        return {rows(), row_ptr_.data(), col_.data(), val_.data()};
    }
    const std::vector<std::int32_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::int32_t>& col() const { return col_; }
    const std::vector<double>& values() const { return val_; }

    double diag(std::size_t r) const;

  private:
    std::vector<std::int32_t> row_ptr_, col_;
    std::vector<double> val_;
    const Grid* grid_ = nullptr;
    bool adjoint_ = false;
    bool peclet_warning_ = false;
    bool flow_compliant_ = true;
    double bc_b_ = 0.0;
    double amplitude_ = 0.0;
    double sym_gershgorin_ = 0.0;

    friend OperatorMatrix assemble_impl(const CoefficientSet&, const BoundaryCondition&, int, bool);
    friend OperatorMatrix combine(double, const OperatorMatrix&, double, const OperatorMatrix&);
};

OperatorMatrix assemble(const CoefficientSet& coeffs, const BoundaryCondition& bc);
OperatorMatrix assemble_adjoint(const CoefficientSet& coeffs, const BoundaryCondition& bc);
// The advection block alone at unit amplitude (dM/dA); Dirichlet boundary
// rows are zero, not identity.
OperatorMatrix assemble_advection(const CoefficientSet& coeffs, const BoundaryCondition& bc);

ScalarField apply(const OperatorMatrix& m, const ScalarField& f);

// alpha*m1 + beta*m2 for matrices with identical sparsity patterns (any two
// assemblies over the same grid/bc qualify).
OperatorMatrix combine(double alpha, const OperatorMatrix& m1, double beta,
                       const OperatorMatrix& m2);

// Max over `samples` random smooth field pairs (f,g) of
// |<Mf,g>_W - <f,M*g>_W| / (1 + |<Mf,g>_W| + |<f,M*g>_W|).
// For tangential divergence-free flows (or Dirichlet) this is rounding
// noise; for V.n != 0 it reports the O(1) boundary term.
double adjoint_consistency_check(const CoefficientSet& coeffs, const BoundaryCondition& bc,
                                 int samples = 10);

// MatrixMarket coordinate format, row-major, 17 significant digits.
void write_matrix_market(const OperatorMatrix& m, const std::string& path);

}  // namespace adveig
