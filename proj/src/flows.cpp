#include "adveig/flows.hpp"

#include <algorithm>
#include <cmath>

#include "adveig/errors.hpp"

namespace adveig {

double Flow::max_speed() const {
    double m = 0.0;
    for (int d = 0; d < velocity.dim(); ++d)
        for (double v : velocity.comp(d)) m = std::max(m, std::fabs(v));
    return m;
}

Flow realize(const FlowSpec& spec, const Grid& grid) {
    Flow flow;
    flow.kind = spec.kind;
    flow.velocity = VectorField(grid);
    switch (spec.kind) {
        case FlowKind::Zero:
            break;
        case FlowKind::Constant:
            std::fill(flow.velocity.comp(0).begin(), flow.velocity.comp(0).end(), spec.cx);
            if (grid.dim() == 2)
                std::fill(flow.velocity.comp(1).begin(), flow.velocity.comp(1).end(), spec.cy);
            break;
        case FlowKind::Shear: {
            if (grid.dim() != 2) raise("DimensionMismatch", "shear flow needs a 2D grid");
            const int along = spec.shear_direction == 0 ? 0 : 1;
            for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
                const double cross = along == 0 ? grid.y(idx) : grid.x(idx);
                flow.velocity.comp(along)[idx] = spec.alpha.eval(cross, cross, true);
            }
            break;
        }
        case FlowKind::StreamFunction: {
            if (grid.dim() != 2) raise("DimensionMismatch", "stream function needs a 2D grid");
            flow.psi = ScalarField::from_expr(grid, spec.psi);
            flow.velocity.comp(0) = partial(flow.psi, 1).values();
            ScalarField dpsidx = partial(flow.psi, 0);
            auto& v2 = flow.velocity.comp(1);
            for (std::size_t i = 0; i < v2.size(); ++i) v2[i] = -dpsidx[i];
            break;
        }
        case FlowKind::Gradient: {
            flow.m = ScalarField::from_expr(grid, spec.m);
            VectorField g = grad(flow.m);
            flow.velocity = std::move(g);
            break;
        }
    }
    flow.velocity.ensure_finite("flow velocity");
    return flow;
}

double divergence_residual(const VectorField& v) {
    const Grid& g = v.grid();
    double worst = 0.0;
    if (g.dim() == 1) {
        const auto& u = v.comp(0);
        for (int i = 1; i + 1 < g.nx(); ++i)
            worst = std::max(worst, std::fabs((u[i + 1] - u[i - 1]) / (2.0 * g.hx())));
        return worst;
    }
    const auto& v1 = v.comp(0);
    const auto& v2 = v.comp(1);
    for (int j = 1; j + 1 < g.ny(); ++j)
        for (int i = 1; i + 1 < g.nx(); ++i) {
            const std::size_t idx = g.index(i, j);
            const double div = (v1[idx + 1] - v1[idx - 1]) / (2.0 * g.hx()) +
                               (v2[idx + g.nx()] - v2[idx - g.nx()]) / (2.0 * g.hy());
            worst = std::max(worst, std::fabs(div));
        }
    return worst;
}

double normal_flux_residual(const VectorField& v) {
    const Grid& g = v.grid();
    double worst = 0.0;
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        const std::uint8_t t = g.tag(idx);
        if (!t) continue;
        if (t & (kSideLeft | kSideRight)) worst = std::max(worst, std::fabs(v.comp(0)[idx]));
        if (g.dim() == 2 && (t & (kSideBottom | kSideTop)))
            worst = std::max(worst, std::fabs(v.comp(1)[idx]));
    }
    return worst;
}

bool is_compliant(const VectorField& v, bool dirichlet, double div_tol, double flux_tol) {
    if (divergence_residual(v) > div_tol) return false;
    if (dirichlet) return true;
    return normal_flux_residual(v) <= flux_tol;
}

}  // namespace adveig
