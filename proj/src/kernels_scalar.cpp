#include "adveig/kernels.hpp"

#include <cmath>

namespace adveig::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double dot3(const double* w, const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * y[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

void spmv(const CsrView& m, const double* x, double* y) {
    for (std::size_t r = 0; r < m.nrows; ++r) {
        double acc = 0.0;
        for (std::int32_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
            acc += m.val[k] * x[m.col[k]];
        y[r] = acc;
    }
}

}  // namespace adveig::kernels::scalar
