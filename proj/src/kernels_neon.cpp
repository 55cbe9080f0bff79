// NEON variants for aarch64. float64x2_t is baseline on aarch64, so this TU
// needs no extra compile flags there.
#include "adveig/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace adveig::kernels::neon {

double dot(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double dot3(const double* w, const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t wx = vmulq_f64(vld1q_f64(w + i), vld1q_f64(x + i));
        acc0 = vfmaq_f64(acc0, wx, vld1q_f64(y + i));
    }
    double acc = vaddvq_f64(acc0);
    for (; i < n; ++i) acc += w[i] * x[i] * y[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

double max_abs(const double* x, std::size_t n) {
    float64x2_t vm = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vm = vmaxq_f64(vm, vabsq_f64(vld1q_f64(x + i)));
    double m = vmaxvq_f64(vm);
    for (; i < n; ++i) {
        double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

void spmv(const CsrView& m, const double* x, double* y) {
    for (std::size_t r = 0; r < m.nrows; ++r) {
        const std::int32_t begin = m.row_ptr[r], end = m.row_ptr[r + 1];
        float64x2_t vacc = vdupq_n_f64(0.0);
        std::int32_t k = begin;
        for (; k + 2 <= end; k += 2) {
            float64x2_t xs = {x[m.col[k]], x[m.col[k + 1]]};
            vacc = vfmaq_f64(vacc, vld1q_f64(m.val + k), xs);
        }
        double acc = vaddvq_f64(vacc);
        for (; k < end; ++k) acc += m.val[k] * x[m.col[k]];
        y[r] = acc;
    }
}

}  // namespace adveig::kernels::neon
