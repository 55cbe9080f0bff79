#pragma once
// Amplitude sweeps with monotonicity classification, first-integral
// Rayleigh-quotient bounds, the min-max characterization checks, the
// large-amplitude limit probe for Robin/Neumann problems, the 1D
// counterexample regime where V.n != 0, and the gradient-flow
// cross-validation sweep.

#include <memory>
#include <string>
#include <vector>

#include "adveig/assembly.hpp"
#include "adveig/eigensolver.hpp"
#include "adveig/flows.hpp"
#include "adveig/functional.hpp"
#include "adveig/mesh.hpp"

namespace adveig {

struct ProblemSpec {
    std::shared_ptr<const Grid> grid;
    BoundaryCondition bc;
    ScalarField a, c;
    FlowSpec flow_spec;
    Flow flow;
    SolverOptions solver;

    CoefficientSet coefficients(double amplitude) const;
};

ProblemSpec make_problem(const GridSpec& gs, double b, const std::string& a_expr,
                         const std::string& c_expr, const FlowSpec& flow_spec,
                         SolverOptions solver = {});

struct Solved {
    OperatorMatrix m, m_adj;
    EigenPair pair;
};
Solved solve_problem(const ProblemSpec& spec, double amplitude);

enum class Classification { StrictlyIncreasing, Flat, NonMonotone };
const char* to_string(Classification c);

struct SweepRow {
    double amplitude = 0.0;
    double lambda = 0.0;
    double dlam_formula = 0.0;
    double dlam_central = 0.0;
    double residual = 0.0;
    bool positivity = false;
    bool has_derivatives = false;
    bool failed = false;
    std::string error;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    Classification classification = Classification::Flat;
    std::string regime;  // theorem-consistent | counterexample-regime | discretization-failure
    double first_integral_indicator = 0.0;
    double div_residual = 0.0;
    double flux_residual = 0.0;
    bool compliant = false;
    bool flat_ok = true;      // expectation checks filled by classify
    bool monotone_ok = true;
    double lambda0 = 0.0;
    // gradient_flow_sweep only: eigenvalue of the symmetric-form assembly.
    std::vector<double> lambda_sym;
    bool sym_ok = true;
};

struct SweepOptions {
    bool derivatives = true;
    double fd_delta = 0.01;
    int threads = 0;  // 0: ADVEIG_THREADS or hardware_concurrency
};

SweepReport sweep(const ProblemSpec& spec, const std::vector<double>& amplitudes,
                  const SweepOptions& opts = {});

// Fills indicator/classification/regime fields of the report; u0_pair is
// the zero-amplitude eigenpair of the same problem.
void classify(SweepReport& report, const EigenPair& u0_pair, const ProblemSpec& spec);

struct FirstIntegralFamily {
    std::vector<ScalarField> fields;
    std::vector<VectorField> gradients;  // chain-rule gradients p'(psi) grad psi
    double membership_residual = 0.0;    // max |V . grad f_k|
};

// Polynomials 1, psi, ..., psi^degree for stream-function flows (for b = 1
// the constant is replaced by the vanishing cutoff psi itself); the constant
// alone for every other flow.
FirstIntegralFamily build_first_integral_family(const ProblemSpec& spec, int degree);

// Minimizes [kappa oint w^2 + int a|grad w|^2 + int c w^2] / int w^2 over
// the span of the family via the mass-orthonormalized symmetric eigenproblem.
// Throws Error("SingularMass") if the basis degenerates completely.
double first_integral_bound(const ProblemSpec& spec, const FirstIntegralFamily& family);

struct MinmaxReport {
    double lambda = 0.0;
    double worst_peak_offset = 0.0;  // max |t*| over scan directions
    double worst_peak_gap = 0.0;     // max |J(omega_{t*}) - lambda|
    double weight_gap = 0.0;         // max |int p^2 (Lu/u) - lambda| over random p
    double ratio_spread = 0.0;       // max |(Lu)_x / u_x - lambda|
    double scan_step = 0.05;
    double tol = 0.0;
    bool pass_peak = false, pass_weight = false, pass_ratio = false;
    bool pass() const { return pass_peak && pass_weight && pass_ratio; }
};

MinmaxReport minmax_verify(const ProblemSpec& spec, double amplitude);

struct LimitReport {
    std::vector<double> amplitudes;
    std::vector<double> lambdas;
    double limit_estimate = 0.0;
    double bound = 0.0;
    double gap = 0.0;  // bound - limit estimate, reported, never asserted
    bool cauchy = false;
    bool monotone_ok = false;
    bool within_bound = false;
};

// Geometric (doubling) amplitude schedule up to a_max. Requires 0 <= b < 1
// and a compliant flow; throws Error("NonCompliantFlow") otherwise.
LimitReport limit_probe(const ProblemSpec& spec, double a_max, double tol_limit = 1e-3,
                        int degree = 6);

struct CounterexampleReport {
    double lambda0 = 0.0;
    double lambda_large = 0.0;
    double c_at_0 = 0.0;
    double flux_residual = 0.0;
    bool decreased = false;   // lambda(A) < lambda(0)
    bool near_limit = false;  // lambda(A) <= c(0) + delta
    bool pass() const { return decreased && near_limit; }
};

// 1D Neumann with V = 1 and nondecreasing nonconstant c; requires
// h <= 1/(4 A) (Error("UnresolvedLayer") otherwise).
CounterexampleReport counterexample_probe(const ProblemSpec& spec, double a_large,
                                          double delta = 0.05);

// Sweep for V = grad m plus the second eigenvalue column from the
// symmetric assembly with potential A^2/4 |grad m|^2 - A/2 div(grad m) + c;
// sym_ok checks row-wise agreement within 1e-6 relative.
SweepReport gradient_flow_sweep(const ProblemSpec& spec, const std::vector<double>& amplitudes,
                                const SweepOptions& opts = {});

struct ScalingCheck {
    double amplitude = 0.0, factor = 0.0;
    double lambda_combined = 0.0, lambda_direct = 0.0;
    double diff = 0.0;
    bool pass = false;
};

// Assembles B*M(A) + (1-B)*M(0) literally and compares its principal
// eigenvalue with lambda(A*B).
ScalingCheck scaling_identity_check(const ProblemSpec& spec, double amplitude, double factor,
                                    double tol = 1e-9);

// lambda(+A) and lambda(-A).
std::pair<double, double> symmetry_check(const ProblemSpec& spec, double amplitude);

}  // namespace adveig
