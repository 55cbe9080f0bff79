#include "adveig/mesh.hpp"

#include <cmath>
#include <cstdio>

#include "adveig/errors.hpp"

namespace adveig {

Grid Grid::interval(double x0, double x1, int nx) {
    GridSpec spec;
    spec.dim = 1;
    spec.x0 = x0;
    spec.x1 = x1;
    spec.nx = nx;
    return build(spec);
}

Grid Grid::rectangle(double x0, double x1, double y0, double y1, int nx, int ny) {
    GridSpec spec;
    spec.dim = 2;
    spec.x0 = x0;
    spec.x1 = x1;
    spec.y0 = y0;
    spec.y1 = y1;
    spec.nx = nx;
    spec.ny = ny;
    return build(spec);
}

Grid Grid::build(const GridSpec& spec) {
    if (spec.dim != 1 && spec.dim != 2) raise("BadGridSpec", "dim must be 1 or 2");
    if (spec.nx < 3) raise("BadGridSpec", "nx must be >= 3");
    if (!(spec.x1 > spec.x0)) raise("BadGridSpec", "x extent degenerate");
    if (spec.dim == 2) {
        if (spec.ny < 3) raise("BadGridSpec", "ny must be >= 3");
        if (!(spec.y1 > spec.y0)) raise("BadGridSpec", "y extent degenerate");
    }
    Grid g;
    g.dim_ = spec.dim;
    g.x0_ = spec.x0;
    g.x1_ = spec.x1;
    g.nx_ = spec.nx;
    g.hx_ = (spec.x1 - spec.x0) / (spec.nx - 1);
    if (spec.dim == 2) {
        g.y0_ = spec.y0;
        g.y1_ = spec.y1;
        g.ny_ = spec.ny;
        g.hy_ = (spec.y1 - spec.y0) / (spec.ny - 1);
    } else {
        g.y0_ = g.y1_ = 0.0;
        g.ny_ = 1;
        g.hy_ = 0.0;
    }
    g.finish();
    return g;
}

void Grid::finish() {
    nodes_ = static_cast<std::size_t>(nx_) * ny_;
    tags_.assign(nodes_, 0);
    weights_.assign(nodes_, 0.0);
    bweights_.assign(nodes_, 0.0);
    if (dim_ == 1) {
        for (int i = 0; i < nx_; ++i) {
            std::uint8_t t = 0;
            if (i == 0) t |= kSideLeft;
            if (i == nx_ - 1) t |= kSideRight;
            tags_[i] = t;
            weights_[i] = (i == 0 || i == nx_ - 1) ? 0.5 * hx_ : hx_;
            bweights_[i] = (t != 0) ? 1.0 : 0.0;
        }
        return;
    }
    for (int j = 0; j < ny_; ++j) {
        const double wy = (j == 0 || j == ny_ - 1) ? 0.5 * hy_ : hy_;
        for (int i = 0; i < nx_; ++i) {
            const double wx = (i == 0 || i == nx_ - 1) ? 0.5 * hx_ : hx_;
            const std::size_t idx = index(i, j);
            std::uint8_t t = 0;
            if (i == 0) t |= kSideLeft;
            if (i == nx_ - 1) t |= kSideRight;
            if (j == 0) t |= kSideBottom;
            if (j == ny_ - 1) t |= kSideTop;
            tags_[idx] = t;
            weights_[idx] = wx * wy;
            double bw = 0.0;
            if (t & (kSideLeft | kSideRight)) bw += wy;
            if (t & (kSideBottom | kSideTop)) bw += wx;
            bweights_[idx] = bw;
        }
    }
}

Grid Grid::refined() const {
    GridSpec spec;
    spec.dim = dim_;
    spec.x0 = x0_;
    spec.x1 = x1_;
    spec.y0 = y0_;
    spec.y1 = y1_;
    spec.nx = 2 * nx_ - 1;
    spec.ny = dim_ == 2 ? 2 * ny_ - 1 : ny_;
    return build(spec);
}

ScalarField::ScalarField(const Grid& grid, double fill)
    : grid_(&grid), values_(grid.node_count(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(&grid), values_(std::move(values)) {
    if (values_.size() != grid.node_count())
        raise("DimensionMismatch", "field size does not match grid");
}

ScalarField ScalarField::from_expr(const Grid& grid, const expr::Ast& ast) {
    if (grid.dim() == 1 && ast.uses_y())
        raise("MissingVariable", "y-dependent expression on a 1D grid");
    ScalarField f(grid);
    const bool has_y = grid.dim() == 2;
    for (std::size_t idx = 0; idx < grid.node_count(); ++idx)
        f[idx] = ast.eval(grid.x(idx), has_y ? grid.y(idx) : 0.0, has_y);
    f.ensure_finite("expression sample");
    return f;
}

ScalarField ScalarField::from_expr(const Grid& grid, const std::string& source) {
    return from_expr(grid, expr::parse(source));
}

void ScalarField::ensure_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v)) raise("NonFiniteField", std::string(what) + " has NaN/Inf entries");
}

VectorField::VectorField(const Grid& grid, double fill) : grid_(&grid) {
    comps_[0].assign(grid.node_count(), fill);
    if (grid.dim() == 2) comps_[1].assign(grid.node_count(), fill);
}

void VectorField::ensure_finite(const char* what) const {
    for (int d = 0; d < dim(); ++d)
        for (double v : comps_[d])
            if (!std::isfinite(v)) raise("NonFiniteField", std::string(what) + " has NaN/Inf entries");
}

double integrate(const ScalarField& f) {
    const Grid& g = f.grid();
    const std::vector<double>& w = g.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f[i];
    return acc;
}

double boundary_integrate(const ScalarField& f) {
    const Grid& g = f.grid();
    const std::vector<double>& bw = g.boundary_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < bw.size(); ++i)
        if (bw[i] != 0.0) acc += bw[i] * f[i];
    return acc;
}

namespace {

// One grid line along dimension d through node idx: stride and line length.
inline void line_of(const Grid& g, int d, std::size_t idx, int& pos, int& n, std::ptrdiff_t& stride) {
    if (d == 0) {
        pos = g.ix(idx);
        n = g.nx();
        stride = 1;
    } else {
        pos = g.iy(idx);
        n = g.ny();
        stride = g.nx();
    }
}

}  // namespace

ScalarField partial(const ScalarField& f, int d) {
    const Grid& g = f.grid();
    if (d < 0 || d >= g.dim()) raise("DimensionMismatch", "partial: bad dimension");
    const double h = d == 0 ? g.hx() : g.hy();
    ScalarField out(g);
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        int pos, n;
        std::ptrdiff_t stride;
        line_of(g, d, idx, pos, n, stride);
        const double* p = f.data() + idx;
        if (pos == 0)
            out[idx] = (-3.0 * p[0] + 4.0 * p[stride] - p[2 * stride]) / (2.0 * h);
        else if (pos == n - 1)
            out[idx] = (3.0 * p[0] - 4.0 * p[-stride] + p[-2 * stride]) / (2.0 * h);
        else
            out[idx] = (p[stride] - p[-stride]) / (2.0 * h);
    }
    return out;
}

VectorField grad(const ScalarField& f) {
    const Grid& g = f.grid();
    VectorField v(g);
    v.comp(0) = partial(f, 0).values();
    if (g.dim() == 2) v.comp(1) = partial(f, 1).values();
    return v;
}

namespace {

void write_rows(std::FILE* fp, const Grid& g, const std::vector<const std::vector<double>*>& cols,
                const char* header) {
    std::fprintf(fp, "%s\n", header);
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        if (g.dim() == 2)
            std::fprintf(fp, "%.17g,%.17g", g.x(idx), g.y(idx));
        else
            std::fprintf(fp, "%.17g", g.x(idx));
        for (const auto* c : cols) std::fprintf(fp, ",%.17g", (*c)[idx]);
        std::fputc('\n', fp);
    }
}

std::FILE* open_or_raise(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) raise("IoError", "cannot open " + path + " for writing");
    return fp;
}

}  // namespace

void write_csv(const ScalarField& f, const std::string& path) {
    std::FILE* fp = open_or_raise(path);
    write_rows(fp, f.grid(), {&f.values()}, f.grid().dim() == 2 ? "x,y,value" : "x,value");
    std::fclose(fp);
}

void write_csv(const VectorField& v, const std::string& path) {
    std::FILE* fp = open_or_raise(path);
    if (v.grid().dim() == 2)
        write_rows(fp, v.grid(), {&v.comp(0), &v.comp(1)}, "x,y,V1,V2");
    else
        write_rows(fp, v.grid(), {&v.comp(0)}, "x,V1");
    std::fclose(fp);
}

}  // namespace adveig
