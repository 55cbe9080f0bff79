#include "adveig/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "adveig/errors.hpp"

namespace adveig {

BoundaryCondition BoundaryCondition::robin(double b) {
    BoundaryCondition bc{b};
    bc.validate();
    return bc;
}

void BoundaryCondition::validate() const {
    if (!(b >= 0.0 && b <= 1.0)) raise("BadBoundaryCondition", "b must lie in [0,1]");
}

void CoefficientSet::validate() const {
    if (!grid) raise("DimensionMismatch", "coefficient set has no grid");
    if (a.size() != grid->node_count() || c.size() != grid->node_count())
        raise("DimensionMismatch", "coefficient fields do not match the grid");
    a.ensure_finite("diffusion coefficient");
    c.ensure_finite("potential coefficient");
    double amin = a[0];
    for (std::size_t i = 0; i < a.size(); ++i) amin = std::min(amin, a[i]);
    if (!(amin > 0.0)) raise("EllipticityViolated", "min a(x) <= 0");
}

double OperatorMatrix::diag(std::size_t r) const {
    for (std::int32_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        if (col_[k] == static_cast<std::int32_t>(r)) return val_[k];
    return 0.0;
}

namespace {

// Antisymmetric face fluxes for the advection term plus the wall-flux
// diagonal. For stream-function flows everything is a difference of
// interpolated stream-function values, so the fluxes around each dual cell
// cancel exactly.
struct AdvectionFluxes {
    std::vector<double> qx;    // (nx-1) * ny   edge (i,j)-(i+1,j)
    std::vector<double> qy;    // nx * (ny-1)   edge (i,j)-(i,j+1)
    std::vector<double> wall;  // per node, outward wall flux (boundary only)
    std::vector<double> divh;  // discrete divergence at nodes
};

AdvectionFluxes build_fluxes(const Flow& flow, const Grid& g) {
    AdvectionFluxes fx;
    const std::size_t n = g.node_count();
    fx.wall.assign(n, 0.0);

    const VectorField& vel = flow.velocity;
    ScalarField div = partial(ScalarField(g, vel.comp(0)), 0);
    if (g.dim() == 2) {
        ScalarField d2 = partial(ScalarField(g, vel.comp(1)), 1);
        for (std::size_t i = 0; i < n; ++i) div[i] += d2[i];
    }
    fx.divh = div.values();

    if (g.dim() == 1) {
        const auto& v = vel.comp(0);
        fx.qx.resize(g.nx() - 1);
        for (int i = 0; i + 1 < g.nx(); ++i) fx.qx[i] = 0.5 * (v[i] + v[i + 1]);
        fx.wall[0] = -v[0];
        fx.wall[g.nx() - 1] = v[g.nx() - 1];
        return fx;
    }

    const int nx = g.nx(), ny = g.ny();
    fx.qx.assign(static_cast<std::size_t>(nx - 1) * ny, 0.0);
    fx.qy.assign(static_cast<std::size_t>(nx) * (ny - 1), 0.0);
    auto QX = [&](int i, int j) -> double& { return fx.qx[static_cast<std::size_t>(j) * (nx - 1) + i]; };
    auto QY = [&](int i, int j) -> double& { return fx.qy[static_cast<std::size_t>(j) * nx + i]; };

    if (flow.kind == FlowKind::StreamFunction) {
        const ScalarField& psi = flow.psi;
        auto P = [&](int i, int j) { return psi[g.index(i, j)]; };
        std::vector<double> center(static_cast<std::size_t>(nx - 1) * (ny - 1));
        auto C = [&](int i, int j) -> double& { return center[static_cast<std::size_t>(j) * (nx - 1) + i]; };
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i + 1 < nx; ++i)
                C(i, j) = 0.25 * (P(i, j) + P(i + 1, j) + P(i, j + 1) + P(i + 1, j + 1));
        std::vector<double> bot(nx - 1), top(nx - 1), lef(ny - 1), rig(ny - 1);
        for (int i = 0; i + 1 < nx; ++i) {
            bot[i] = 0.5 * (P(i, 0) + P(i + 1, 0));
            top[i] = 0.5 * (P(i, ny - 1) + P(i + 1, ny - 1));
        }
        for (int j = 0; j + 1 < ny; ++j) {
            lef[j] = 0.5 * (P(0, j) + P(0, j + 1));
            rig[j] = 0.5 * (P(nx - 1, j) + P(nx - 1, j + 1));
        }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i + 1 < nx; ++i) {
                const double up = (j == ny - 1) ? top[i] : C(i, j);
                const double dn = (j == 0) ? bot[i] : C(i, j - 1);
                QX(i, j) = up - dn;
            }
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double rt = (i == nx - 1) ? rig[j] : C(i, j);
                const double lt = (i == 0) ? lef[j] : C(i - 1, j);
                QY(i, j) = -(rt - lt);
            }
        for (int j = 0; j < ny; ++j) {
            double hi = (j == ny - 1) ? P(0, ny - 1) : lef[j];
            double lo = (j == 0) ? P(0, 0) : lef[j - 1];
            fx.wall[g.index(0, j)] += -(hi - lo);
            hi = (j == ny - 1) ? P(nx - 1, ny - 1) : rig[j];
            lo = (j == 0) ? P(nx - 1, 0) : rig[j - 1];
            fx.wall[g.index(nx - 1, j)] += hi - lo;
        }
        for (int i = 0; i < nx; ++i) {
            double hi = (i == nx - 1) ? P(nx - 1, 0) : bot[i];
            double lo = (i == 0) ? P(0, 0) : bot[i - 1];
            fx.wall[g.index(i, 0)] += hi - lo;
            hi = (i == nx - 1) ? P(nx - 1, ny - 1) : top[i];
            lo = (i == 0) ? P(0, ny - 1) : top[i - 1];
            fx.wall[g.index(i, ny - 1)] += -(hi - lo);
        }
        return fx;
    }

    // Generic flows: centered nodal averages times the dual face length.
    const auto& v1 = vel.comp(0);
    const auto& v2 = vel.comp(1);
    auto ly = [&](int j) { return (j == 0 || j == ny - 1) ? 0.5 * g.hy() : g.hy(); };
    auto lx = [&](int i) { return (i == 0 || i == nx - 1) ? 0.5 * g.hx() : g.hx(); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i)
            QX(i, j) = 0.5 * (v1[g.index(i, j)] + v1[g.index(i + 1, j)]) * ly(j);
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i)
            QY(i, j) = 0.5 * (v2[g.index(i, j)] + v2[g.index(i, j + 1)]) * lx(i);
    for (int j = 0; j < ny; ++j) {
        fx.wall[g.index(0, j)] += -v1[g.index(0, j)] * ly(j);
        fx.wall[g.index(nx - 1, j)] += v1[g.index(nx - 1, j)] * ly(j);
    }
    for (int i = 0; i < nx; ++i) {
        fx.wall[g.index(i, 0)] += -v2[g.index(i, 0)] * lx(i);
        fx.wall[g.index(i, ny - 1)] += v2[g.index(i, ny - 1)] * lx(i);
    }
    return fx;
}

struct RowBuilder {
    std::vector<std::int32_t> row_ptr{0};
    std::vector<std::int32_t> col;
    std::vector<double> val;

    // cols must arrive sorted per row.
    void add(std::int32_t c, double v) {
        col.push_back(c);
        val.push_back(v);
    }
    void finish_row() { row_ptr.push_back(static_cast<std::int32_t>(col.size())); }
};

}  // namespace

OperatorMatrix assemble_impl(const CoefficientSet& coeffs, const BoundaryCondition& bc,
                             int advection_sign, bool advection_only) {
    coeffs.validate();
    bc.validate();
    const Grid& g = *coeffs.grid;
    const std::size_t n = g.node_count();
    const int nx = g.nx(), ny = g.ny();
    const bool two_d = g.dim() == 2;
    const double hx = g.hx(), hy = g.hy();
    const auto& w = g.weights();
    const ScalarField& a = coeffs.a;
    const ScalarField& c = coeffs.c;
    const double amp =
        advection_only ? static_cast<double>(advection_sign)
                       : static_cast<double>(advection_sign) * coeffs.amplitude;
    const bool with_advection = coeffs.flow.kind != FlowKind::Zero && amp != 0.0;

    AdvectionFluxes fx;
    if (with_advection || advection_only) fx = build_fluxes(coeffs.flow, g);

    const double kappa = bc.is_dirichlet() ? 0.0 : bc.kappa();

    OperatorMatrix m;
    m.grid_ = &g;
    m.adjoint_ = advection_sign < 0;
    m.bc_b_ = bc.b;
    m.amplitude_ = coeffs.amplitude;
    m.flow_compliant_ = coeffs.flow.kind == FlowKind::Zero ||
                        is_compliant(coeffs.velocity(), bc.is_dirichlet());

    // Grid Peclet guard |A V_d| h_d / (2 min a) > 1.
    if (!advection_only && with_advection) {
        double amin = a[0], pe = 0.0;
        for (std::size_t i = 0; i < n; ++i) amin = std::min(amin, a[i]);
        for (int d = 0; d < g.dim(); ++d) {
            const double hd = d == 0 ? hx : hy;
            for (double v : coeffs.velocity().comp(d))
                pe = std::max(pe, std::fabs(coeffs.amplitude * v) * hd / (2.0 * amin));
        }
        m.peclet_warning_ = pe > 1.0;
    }

    RowBuilder rb;
    rb.col.reserve(n * (two_d ? 5 : 3));
    rb.val.reserve(n * (two_d ? 5 : 3));

    auto QX = [&](int i, int j) { return fx.qx[static_cast<std::size_t>(j) * (nx - 1) + i]; };
    auto QY = [&](int i, int j) { return fx.qy[static_cast<std::size_t>(j) * nx + i]; };

    double sym_lo = 0.0;
    bool sym_first = true;
    auto track_sym = [&](double d, double radius) {
        const double b = d - radius;
        if (sym_first || b < sym_lo) sym_lo = b;
        sym_first = false;
    };

    for (std::size_t r = 0; r < n; ++r) {
        const int i = g.ix(r), j = g.iy(r);
        const bool boundary = g.is_boundary(r);

        if (bc.is_dirichlet() && boundary) {
            // Identity row forcing u = 0; advection block leaves it empty.
            if (two_d && j > 0) rb.add(static_cast<std::int32_t>(r - nx), 0.0);
            if (i > 0) rb.add(static_cast<std::int32_t>(r - 1), 0.0);
            rb.add(static_cast<std::int32_t>(r), advection_only ? 0.0 : 1.0);
            if (i < nx - 1) rb.add(static_cast<std::int32_t>(r + 1), 0.0);
            if (two_d && j < ny - 1) rb.add(static_cast<std::int32_t>(r + nx), 0.0);
            rb.finish_row();
            track_sym(1.0, 0.0);
            continue;
        }

        double diag = 0.0;
        double south = 0.0, west = 0.0, east = 0.0, north = 0.0;

        if (!advection_only) {
            // Diffusion in flux form with ghost elimination at b<1 walls.
            // x-direction
            if (i > 0 && i < nx - 1) {
                const double am = 0.5 * (a[r - 1] + a[r]);
                const double ap = 0.5 * (a[r] + a[r + 1]);
                diag += (am + ap) / (hx * hx);
                west -= am / (hx * hx);
                east -= ap / (hx * hx);
            } else if (i == 0) {
                const double ap = 0.5 * (a[r] + a[r + 1]);
                diag += 2.0 * ap / (hx * hx) + 2.0 * kappa * ap / (hx * a[r]);
                east -= 2.0 * ap / (hx * hx);
            } else {
                const double am = 0.5 * (a[r - 1] + a[r]);
                diag += 2.0 * am / (hx * hx) + 2.0 * kappa * am / (hx * a[r]);
                west -= 2.0 * am / (hx * hx);
            }
            // y-direction
            if (two_d) {
                if (j > 0 && j < ny - 1) {
                    const double am = 0.5 * (a[r - nx] + a[r]);
                    const double ap = 0.5 * (a[r] + a[r + nx]);
                    diag += (am + ap) / (hy * hy);
                    south -= am / (hy * hy);
                    north -= ap / (hy * hy);
                } else if (j == 0) {
                    const double ap = 0.5 * (a[r] + a[r + nx]);
                    diag += 2.0 * ap / (hy * hy) + 2.0 * kappa * ap / (hy * a[r]);
                    north -= 2.0 * ap / (hy * hy);
                } else {
                    const double am = 0.5 * (a[r - nx] + a[r]);
                    diag += 2.0 * am / (hy * hy) + 2.0 * kappa * am / (hy * a[r]);
                    south -= 2.0 * am / (hy * hy);
                }
            }
            diag += c[r];
        }
        const double diffusion_radius =
            std::fabs(south) + std::fabs(west) + std::fabs(east) + std::fabs(north);

        // The edge-flux couplings are exactly W-skew and do not move real
        // parts; the wall-flux and divergence diagonals are the symmetric
        // piece of the advection and must enter the shift bound.
        double adv_diag = 0.0;
        if (with_advection || advection_only) {
            const double s = amp / w[r];
            if (i < nx - 1) east += s * 0.5 * QX(i, j);
            if (i > 0) west -= s * 0.5 * QX(i - 1, j);
            if (two_d) {
                if (j < ny - 1) north += s * 0.5 * QY(i, j);
                if (j > 0) south -= s * 0.5 * QY(i, j - 1);
            }
            adv_diag = s * 0.5 * fx.wall[r] - 0.5 * amp * fx.divh[r];
            diag += adv_diag;
        }
        if (!advection_only) track_sym(diag, diffusion_radius);

        if (two_d && j > 0) rb.add(static_cast<std::int32_t>(r - nx), south);
        if (i > 0) rb.add(static_cast<std::int32_t>(r - 1), west);
        rb.add(static_cast<std::int32_t>(r), diag);
        if (i < nx - 1) rb.add(static_cast<std::int32_t>(r + 1), east);
        if (two_d && j < ny - 1) rb.add(static_cast<std::int32_t>(r + nx), north);
        rb.finish_row();
    }

    m.row_ptr_ = std::move(rb.row_ptr);
    m.col_ = std::move(rb.col);
    m.val_ = std::move(rb.val);
    m.sym_gershgorin_ = sym_lo;
    return m;
}

OperatorMatrix assemble(const CoefficientSet& coeffs, const BoundaryCondition& bc) {
    return assemble_impl(coeffs, bc, +1, false);
}

OperatorMatrix assemble_adjoint(const CoefficientSet& coeffs, const BoundaryCondition& bc) {
    return assemble_impl(coeffs, bc, -1, false);
}

OperatorMatrix assemble_advection(const CoefficientSet& coeffs, const BoundaryCondition& bc) {
    return assemble_impl(coeffs, bc, +1, true);
}

ScalarField apply(const OperatorMatrix& m, const ScalarField& f) {
    if (f.size() != m.rows()) raise("DimensionMismatch", "apply: field/matrix size mismatch");
    ScalarField out(m.grid());
    kernels::spmv(m.view(), f.data(), out.data());
    return out;
}

OperatorMatrix combine(double alpha, const OperatorMatrix& m1, double beta,
                       const OperatorMatrix& m2) {
    if (m1.col_ != m2.col_ || m1.row_ptr_ != m2.row_ptr_)
        raise("DimensionMismatch", "combine: sparsity patterns differ");
    OperatorMatrix out = m1;
    for (std::size_t k = 0; k < out.val_.size(); ++k)
        out.val_[k] = alpha * m1.val_[k] + beta * m2.val_[k];
    out.amplitude_ = alpha * m1.amplitude_ + beta * m2.amplitude_;
    out.peclet_warning_ = m1.peclet_warning_ || m2.peclet_warning_;
    out.flow_compliant_ = m1.flow_compliant_ && m2.flow_compliant_;
    out.sym_gershgorin_ = std::min(m1.sym_gershgorin_, m2.sym_gershgorin_);
    return out;
}

namespace {

// Smooth random field respecting the boundary-condition family: products of
// cosines have zero normal derivative (Neumann/Robin test family); products
// of sines vanish on the boundary (Dirichlet family).
ScalarField random_smooth_field(const Grid& g, bool dirichlet, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ScalarField f(g);
    const double lx = g.x1() - g.x0();
    const double ly = g.dim() == 2 ? g.y1() - g.y0() : 1.0;
    for (int k = 0; k <= 3; ++k)
        for (int l = 0; l <= (g.dim() == 2 ? 3 : 0); ++l) {
            const double ck = U(rng);
            for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
                const double tx = (g.x(idx) - g.x0()) / lx;
                const double ty = g.dim() == 2 ? (g.y(idx) - g.y0()) / ly : 0.0;
                double m;
                if (dirichlet)
                    m = std::sin((k + 1) * M_PI * tx) *
                        (g.dim() == 2 ? std::sin((l + 1) * M_PI * ty) : 1.0);
                else
                    m = std::cos(k * M_PI * tx) * (g.dim() == 2 ? std::cos(l * M_PI * ty) : 1.0);
                f[idx] += ck * m;
            }
        }
    return f;
}

}  // namespace

double adjoint_consistency_check(const CoefficientSet& coeffs, const BoundaryCondition& bc,
                                 int samples) {
    OperatorMatrix fwd = assemble(coeffs, bc);
    OperatorMatrix adj = assemble_adjoint(coeffs, bc);
    const Grid& g = *coeffs.grid;
    const auto& w = g.weights();
    std::mt19937_64 rng(0x5eedf00dULL);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        ScalarField f = random_smooth_field(g, bc.is_dirichlet(), rng);
        ScalarField gfield = random_smooth_field(g, bc.is_dirichlet(), rng);
        ScalarField mf = apply(fwd, f);
        ScalarField mg = apply(adj, gfield);
        const double lhs = kernels::dot3(w.data(), mf.data(), gfield.data(), w.size());
        const double rhs = kernels::dot3(w.data(), f.data(), mg.data(), w.size());
        const double scale = 1.0 + std::fabs(lhs) + std::fabs(rhs);
        worst = std::max(worst, std::fabs(lhs - rhs) / scale);
    }
    return worst;
}

void write_matrix_market(const OperatorMatrix& m, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) raise("IoError", "cannot open " + path + " for writing");
    const std::size_t n = m.rows();
    std::fprintf(fp, "%%%%MatrixMarket matrix coordinate real general\n");
    std::fprintf(fp, "%zu %zu %zu\n", n, n, m.col().size());
    for (std::size_t r = 0; r < n; ++r)
        for (std::int32_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k)
            std::fprintf(fp, "%zu %d %.17g\n", r + 1, m.col()[k] + 1, m.values()[k]);
    std::fclose(fp);
}

}  // namespace adveig
