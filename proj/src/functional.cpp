#include "adveig/functional.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

#include "adveig/errors.hpp"
#include "adveig/kernels.hpp"

namespace adveig {

namespace {

// Normal derivative n . grad(f) at a boundary node for a given side.
double normal_derivative(const ScalarField& dfdx, const ScalarField& dfdy, std::size_t idx,
                         BoundarySide side) {
    switch (side) {
        case kSideLeft: return -dfdx[idx];
        case kSideRight: return dfdx[idx];
        case kSideBottom: return -dfdy[idx];
        case kSideTop: return dfdy[idx];
    }
    return 0.0;
}

std::vector<BoundarySide> sides_of(std::uint8_t tag, int dim) {
    std::vector<BoundarySide> s;
    if (tag & kSideLeft) s.push_back(kSideLeft);
    if (tag & kSideRight) s.push_back(kSideRight);
    if (dim == 2) {
        if (tag & kSideBottom) s.push_back(kSideBottom);
        if (tag & kSideTop) s.push_back(kSideTop);
    }
    return s;
}

// log(omega/u) with the Dirichlet boundary values filled by quadratic
// extrapolation along the inward normal (the nodal ratio is 0/0 there).
ScalarField log_ratio(const ScalarField& num, const ScalarField& den, bool dirichlet) {
    const Grid& g = num.grid();
    ScalarField out(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (dirichlet && g.is_boundary(i)) continue;
        if (!(num[i] > 0.0) || !(den[i] > 0.0))
            raise("ConeViolation", "log ratio of non-positive field values");
        out[i] = std::log(num[i] / den[i]);
    }
    if (!dirichlet) return out;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!g.is_boundary(i)) continue;
        const auto sides = sides_of(g.tag(i), g.dim());
        double acc = 0.0;
        for (BoundarySide s : sides) {
            std::ptrdiff_t stride = 0;
            int room = 0;
            switch (s) {
                case kSideLeft: stride = 1; room = g.nx() - 1; break;
                case kSideRight: stride = -1; room = g.nx() - 1; break;
                case kSideBottom: stride = g.nx(); room = g.ny() - 1; break;
                case kSideTop: stride = -g.nx(); room = g.ny() - 1; break;
            }
            const double* p = out.data() + i;
            acc += room >= 3 ? 3.0 * p[stride] - 3.0 * p[2 * stride] + p[3 * stride]
                             : 2.0 * p[stride] - p[2 * stride];
        }
        out[i] = acc / static_cast<double>(sides.size());
    }
    return out;
}

}  // namespace

ConeElement make_cone_element(const ScalarField& omega, const BoundaryCondition& bc,
                              const ScalarField& a) {
    const Grid& g = omega.grid();
    omega.ensure_finite("cone element");
    double omax = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        omax = std::max(omax, std::fabs(omega[i]));
        if (!g.is_boundary(i) && !(omega[i] > 0.0))
            raise("ConeViolation", "omega must be positive at interior nodes");
    }

    ConeElement elem;
    elem.omega = omega;
    elem.b = bc.b;

    ScalarField dwdx = partial(omega, 0);
    ScalarField dwdy = g.dim() == 2 ? partial(omega, 1) : ScalarField(g);

    if (bc.is_dirichlet()) {
        double slope = 0.0;
        bool first = true;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            if (!g.is_boundary(i)) continue;
            if (std::fabs(omega[i]) > 1e-10 * std::max(1.0, omax))
                raise("ConeViolation", "omega must vanish on the Dirichlet boundary");
            elem.bc_residual = std::max(elem.bc_residual, std::fabs(omega[i]));
            for (BoundarySide s : sides_of(g.tag(i), g.dim())) {
                const double inward = -normal_derivative(dwdx, dwdy, i, s);
                if (first || inward < slope) slope = inward;
                first = false;
            }
        }
        elem.min_inward_slope = slope;
        if (!(slope > 0.0))
            raise("ConeViolation", "omega needs a positive inward slope on the boundary");
        return elem;
    }

    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!g.is_boundary(i)) continue;
        if (!(omega[i] > 0.0))
            raise("ConeViolation", "omega must be positive up to the boundary for b < 1");
        for (BoundarySide s : sides_of(g.tag(i), g.dim())) {
            const double flux = a[i] * normal_derivative(dwdx, dwdy, i, s);
            elem.bc_residual =
                std::max(elem.bc_residual, std::fabs(bc.b * omega[i] + (1.0 - bc.b) * flux));
        }
    }
    return elem;
}

ConeElement cone_perturb(const EigenPair& pair, const ScalarField& phi, double t,
                         const BoundaryCondition& bc, const ScalarField& a) {
    const Grid& g = pair.u.grid();
    ScalarField omega(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) omega[i] = pair.u[i] * std::exp(t * phi[i]);
    return make_cone_element(omega, bc, a);
}

ScalarField random_cos_field(const Grid& g, std::mt19937_64& rng, int max_mode) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ScalarField f(g);
    const double lx = g.x1() - g.x0();
    const double ly = g.dim() == 2 ? g.y1() - g.y0() : 1.0;
    for (int k = 0; k <= max_mode; ++k)
        for (int l = 0; l <= (g.dim() == 2 ? max_mode : 0); ++l) {
            const double ck = U(rng);
            for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
                const double tx = (g.x(idx) - g.x0()) / lx;
                double m = std::cos(k * M_PI * tx);
                if (g.dim() == 2) m *= std::cos(l * M_PI * (g.y(idx) - g.y0()) / ly);
                f[idx] += ck * m;
            }
        }
    const double m = kernels::max_abs(f.data(), f.size());
    if (m > 0.0) kernels::scale(f.data(), 1.0 / m, f.size());
    return f;
}

double eval_J(const ConeElement& elem, const EigenPair& pair, const OperatorMatrix& m) {
    const Grid& g = m.grid();
    if (elem.omega.size() != g.node_count()) raise("DimensionMismatch", "eval_J: omega size");
    const bool dirichlet = m.bc_b() == 1.0;
    ScalarField lw = apply(m, elem.omega);
    const auto& w = g.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (dirichlet && g.is_boundary(i)) continue;  // u v / omega -> 0
        acc += w[i] * pair.u[i] * pair.v[i] * (lw[i] / elem.omega[i]);
    }
    return acc;
}

namespace {

double quadratic_energy(const ScalarField& lr, const EigenPair& pair, const ScalarField& a) {
    const Grid& g = lr.grid();
    VectorField grad_lr = grad(lr);
    const auto& w = g.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double g2 = grad_lr.comp(0)[i] * grad_lr.comp(0)[i];
        if (g.dim() == 2) g2 += grad_lr.comp(1)[i] * grad_lr.comp(1)[i];
        acc += w[i] * pair.u[i] * pair.v[i] * a[i] * g2;
    }
    return acc;
}

}  // namespace

double lemma2_residual(const ConeElement& elem, const EigenPair& pair, const OperatorMatrix& m,
                       const ScalarField& a) {
    const bool dirichlet = m.bc_b() == 1.0;
    const auto& w = m.grid().weights();
    ScalarField mu = apply(m, pair.u);
    const double j_u = kernels::dot3(w.data(), pair.v.data(), mu.data(), w.size());
    const double j_w = eval_J(elem, pair, m);
    ScalarField lr = log_ratio(elem.omega, pair.u, dirichlet);
    const double q = quadratic_energy(lr, pair, a);
    return std::fabs(j_u - j_w - q) / (1.0 + std::fabs(j_u));
}

double corollary_residual(const EigenPair& pair, const OperatorMatrix& m, const ScalarField& a) {
    const bool dirichlet = m.bc_b() == 1.0;
    const auto& w = m.grid().weights();
    ScalarField mu = apply(m, pair.u);
    ScalarField mv = apply(m, pair.v);
    const double v_lu = kernels::dot3(w.data(), pair.v.data(), mu.data(), w.size());
    const double u_lv = kernels::dot3(w.data(), pair.u.data(), mv.data(), w.size());
    ScalarField lr = log_ratio(pair.v, pair.u, dirichlet);
    const double q = quadratic_energy(lr, pair, a);
    return std::fabs(v_lu - u_lv - q) / (1.0 + std::fabs(pair.lambda));
}

double derivative_by_formula(const EigenPair& pair, const OperatorMatrix& advection) {
    const auto& w = advection.grid().weights();
    ScalarField tu = apply(advection, pair.u);
    return kernels::dot3(w.data(), pair.v.data(), tu.data(), w.size());
}

SensitivityField solve_sensitivity(const EigenPair& pair, const OperatorMatrix& m,
                                   const OperatorMatrix& advection) {
    const Grid& g = m.grid();
    const std::size_t n = m.rows();
    const auto& w = g.weights();
    const double lambda = pair.lambda;

    SensitivityField out;
    out.lambda_prime = derivative_by_formula(pair, advection);

    ScalarField tu = apply(advection, pair.u);
    std::vector<double> rhs(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = out.lambda_prime * pair.u[i] - tu[i];

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m.col().size() + 2 * n + 1);
    for (std::size_t r = 0; r < n; ++r)
        for (std::int32_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
            double v = m.values()[k];
            if (m.col()[k] == static_cast<std::int32_t>(r)) v -= lambda;
            trips.emplace_back(static_cast<int>(r), m.col()[k], v);
        }
    for (std::size_t i = 0; i < n; ++i) {
        trips.emplace_back(static_cast<int>(i), static_cast<int>(n), w[i] * pair.v[i]);
        trips.emplace_back(static_cast<int>(n), static_cast<int>(i), w[i] * pair.u[i]);
    }
    Eigen::SparseMatrix<double> bordered(static_cast<int>(n + 1), static_cast<int>(n + 1));
    bordered.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(bordered);
    if (lu.info() != Eigen::Success)
        raise("BorderedSolveFailure", "LU factorization of the bordered system failed");
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<int>(n + 1));
    Eigen::VectorXd x = lu.solve(b);

    out.du = ScalarField(g, std::vector<double>(x.data(), x.data() + n));

    // Residual of the un-bordered equation and of the side constraint.
    ScalarField mdu = apply(m, out.du);
    double rr = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ri = mdu[i] - lambda * out.du[i] - rhs[i];
        rr += w[i] * ri * ri;
        scale += w[i] * rhs[i] * rhs[i];
    }
    out.equation_residual = std::sqrt(rr) / (1.0 + std::sqrt(scale));
    out.ortho_residual =
        std::fabs(kernels::dot3(w.data(), pair.u.data(), out.du.data(), n));
    if (out.equation_residual > 1e-8 || out.ortho_residual > 1e-8)
        raise("BorderedSolveFailure", "sensitivity residuals did not close below 1e-8");
    return out;
}

double second_derivative_at_zero(const EigenPair& pair0, const SensitivityField& sens,
                                 const CoefficientSet& coeffs, const BoundaryCondition& bc) {
    const Grid& g = pair0.u.grid();
    const ScalarField& du = sens.du;
    const auto& w = g.weights();
    VectorField gdu = grad(du);
    double interior = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double g2 = gdu.comp(0)[i] * gdu.comp(0)[i];
        if (g.dim() == 2) g2 += gdu.comp(1)[i] * gdu.comp(1)[i];
        interior += w[i] * (coeffs.a[i] * g2 + coeffs.c[i] * du[i] * du[i]);
        mass += w[i] * du[i] * du[i];
    }
    double boundary = 0.0;
    if (!bc.is_dirichlet() && bc.b > 0.0) {
        ScalarField du2(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) du2[i] = du[i] * du[i];
        boundary = bc.kappa() * boundary_integrate(du2);
    }
    return 2.0 * (boundary + interior - pair0.lambda * mass);
}

}  // namespace adveig
