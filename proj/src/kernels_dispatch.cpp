#include "adveig/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace adveig::kernels {

namespace {

struct Backend {
    const char* name;
    double (*dot)(const double*, const double*, std::size_t);
    double (*dot3)(const double*, const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double*, double, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    void (*spmv)(const CsrView&, const double*, double*);
};

constexpr Backend kScalar = {"scalar", scalar::dot,   scalar::dot3,
                             scalar::axpy, scalar::scale, scalar::max_abs,
                             scalar::spmv};

#if defined(ADVEIG_BUILD_AVX2)
constexpr Backend kAvx2 = {"avx2", avx2::dot,   avx2::dot3, avx2::axpy,
                           avx2::scale, avx2::max_abs, avx2::spmv};
#endif
#if defined(ADVEIG_BUILD_NEON)
constexpr Backend kNeon = {"neon", neon::dot,   neon::dot3, neon::axpy,
                           neon::scale, neon::max_abs, neon::spmv};
#endif

const Backend& select() {
    const char* force = std::getenv("ADVEIG_SIMD");
    if (force && std::strcmp(force, "scalar") == 0) return kScalar;
#if defined(ADVEIG_BUILD_AVX2)
    if (force && std::strcmp(force, "avx2") == 0) return kAvx2;
    if (!force && __builtin_cpu_supports("avx2")) return kAvx2;
#endif
#if defined(ADVEIG_BUILD_NEON)
    if (force && std::strcmp(force, "neon") == 0) return kNeon;
    if (!force) return kNeon;
#endif
    return kScalar;
}

const Backend& active() {
    static const Backend& b = select();
    return b;
}

}  // namespace

const char* active_backend() { return active().name; }

double dot(const double* x, const double* y, std::size_t n) {
    return active().dot(x, y, n);
}
double dot3(const double* w, const double* x, const double* y, std::size_t n) {
    return active().dot3(w, x, y, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
    active().axpy(a, x, y, n);
}
void scale(double* x, double a, std::size_t n) { active().scale(x, a, n); }
double max_abs(const double* x, std::size_t n) { return active().max_abs(x, n); }
void spmv(const CsrView& m, const double* x, double* y) { active().spmv(m, x, y); }

}  // namespace adveig::kernels
