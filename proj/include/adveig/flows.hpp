#pragma once
// Incompressible velocity fields and the diagnostics for the two structural
// assumptions the eigenvalue theory rests on: div V = 0 in the domain and
// V.n = 0 on the boundary.

#include "adveig/expr.hpp"
#include "adveig/mesh.hpp"

namespace adveig {

enum class FlowKind { Zero, Constant, Shear, StreamFunction, Gradient };

struct FlowSpec {
    FlowKind kind = FlowKind::Zero;
    expr::Ast psi;            // StreamFunction (2D only)
    expr::Ast alpha;          // Shear profile of the cross variable
    int shear_direction = 0;  // 0: V = (alpha(y), 0), 1: V = (0, alpha(x))
    double cx = 0.0, cy = 0.0;  // Constant
    expr::Ast m;              // Gradient potential, V = grad m
};

// A realized flow keeps the sampled stream function next to the velocity so
// the operator assembly can build exactly divergence-free face fluxes.
struct Flow {
    FlowKind kind = FlowKind::Zero;
    VectorField velocity;
    ScalarField psi;  // valid iff kind == StreamFunction
    ScalarField m;    // valid iff kind == Gradient

    double max_speed() const;
};

// StreamFunction yields V = (d(psi)/dy, -d(psi)/dx) through the mesh
// gradient stencils; Gradient yields grad m; Shear and Constant are sampled
// directly. Throws Error("DimensionMismatch") for incompatible grid dims.
Flow realize(const FlowSpec& spec, const Grid& grid);

// Max over interior nodes of the central-difference divergence.
double divergence_residual(const VectorField& v);

// Max over boundary nodes of |V.n| (corners report the worse side).
double normal_flux_residual(const VectorField& v);

bool is_compliant(const VectorField& v, bool dirichlet,
                  double div_tol = 1e-10, double flux_tol = 1e-10);

}  // namespace adveig
