#pragma once
// Structured vertex-centered grids on intervals and rectangles, nodal
// scalar/vector fields, trapezoidal quadrature for interior and boundary
// integrals, and second-order discrete gradients (central stencils inside,
// 3-point one-sided stencils on the boundary).

#include <cstdint>
#include <string>
#include <vector>

#include "adveig/expr.hpp"

namespace adveig {

enum BoundarySide : std::uint8_t {
    kSideLeft = 1,
    kSideRight = 2,
    kSideBottom = 4,
    kSideTop = 8,
};

struct GridSpec {
    int dim = 1;
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;
    int nx = 3, ny = 3;
};

class Grid {
  public:
    static Grid interval(double x0, double x1, int nx);
    static Grid rectangle(double x0, double x1, double y0, double y1, int nx, int ny);
    static Grid build(const GridSpec& spec);  // throws Error("BadGridSpec")

    int dim() const { return dim_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t node_count() const { return nodes_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double x0() const { return x0_; }
    double x1() const { return x1_; }
    double y0() const { return y0_; }
    double y1() const { return y1_; }

    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(j) * nx_ + i; }
    int ix(std::size_t idx) const { return static_cast<int>(idx % nx_); }
    int iy(std::size_t idx) const { return static_cast<int>(idx / nx_); }
    double x(std::size_t idx) const { return x0_ + ix(idx) * hx_; }
    double y(std::size_t idx) const { return y0_ + iy(idx) * hy_; }

    std::uint8_t tag(std::size_t idx) const { return tags_[idx]; }
    bool is_boundary(std::size_t idx) const { return tags_[idx] != 0; }

    // Trapezoid quadrature weight of a node (tensor product in 2D).
    const std::vector<double>& weights() const { return weights_; }
    // Boundary quadrature weight (0 at interior nodes). In 1D both endpoints
    // carry weight 1, so the boundary integral is the sum of the endpoint
    // values. In 2D a corner carries half-weights from both incident sides.
    const std::vector<double>& boundary_weights() const { return bweights_; }

    // Same extents with spacing halved (node counts 2n-1).
    Grid refined() const;

  private:
    int dim_ = 1;
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
    int nx_ = 0, ny_ = 1;
    double hx_ = 0, hy_ = 0;
    std::size_t nodes_ = 0;
    std::vector<std::uint8_t> tags_;
    std::vector<double> weights_;
    std::vector<double> bweights_;

    void finish();
};

class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double fill = 0.0);
    ScalarField(const Grid& grid, std::vector<double> values);

    static ScalarField from_expr(const Grid& grid, const expr::Ast& ast);
    static ScalarField from_expr(const Grid& grid, const std::string& source);

    const Grid& grid() const { return *grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }

    void ensure_finite(const char* what) const;

  private:
    const Grid* grid_ = nullptr;
    std::vector<double> values_;
};

class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(const Grid& grid, double fill = 0.0);

    const Grid& grid() const { return *grid_; }
    int dim() const { return grid_->dim(); }
    // Component d in {0,1}; a 1D field only has component 0.
    const std::vector<double>& comp(int d) const { return comps_[d]; }
    std::vector<double>& comp(int d) { return comps_[d]; }

    void ensure_finite(const char* what) const;

  private:
    const Grid* grid_ = nullptr;
    std::vector<double> comps_[2];
};

// Trapezoidal rule; exact for fields affine in each coordinate.
double integrate(const ScalarField& f);
// Trapezoidal rule side by side; 1D: f(x0) + f(x1).
double boundary_integrate(const ScalarField& f);

// Partial derivative along dimension d (0 = x, 1 = y): central differences
// at inner nodes, 3-point one-sided at the two ends of each grid line.
ScalarField partial(const ScalarField& f, int d);
VectorField grad(const ScalarField& f);

// CSV "x[,y],value" with 17 significant digits, one row per node.
void write_csv(const ScalarField& f, const std::string& path);
void write_csv(const VectorField& v, const std::string& path);

}  // namespace adveig
