#pragma once
// Dense vector / sparse matrix-vector kernels used by the quadrature,
// residual and eigensolver inner loops.
//
// Every kernel has a scalar reference implementation (kernels::scalar) and
// may have SIMD variants (AVX2 on x86-64, NEON on aarch64) compiled into
// separate translation units with the ISA enabled. The public entry points
// route through a dispatch table filled in once at startup from a cpuid
// probe; the environment variable ADVEIG_SIMD=scalar|avx2|neon overrides
// the probe (used by the equivalence tests).

#include <cstddef>
#include <cstdint>

namespace adveig::kernels {

// y[i] over CSR row r: row_ptr has nrows+1 entries, col/val aligned arrays.
struct CsrView {
    std::size_t nrows = 0;
    const std::int32_t* row_ptr = nullptr;
    const std::int32_t* col = nullptr;
    const double* val = nullptr;
};

double dot(const double* x, const double* y, std::size_t n);
// sum_i w[i]*x[i]*y[i]; the quadrature inner product <x,y>_W.
double dot3(const double* w, const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double* x, double a, std::size_t n);
double max_abs(const double* x, std::size_t n);
void spmv(const CsrView& m, const double* x, double* y);

// Name of the active backend ("scalar", "avx2", "neon").
const char* active_backend();

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
double dot3(const double* w, const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double* x, double a, std::size_t n);
double max_abs(const double* x, std::size_t n);
void spmv(const CsrView& m, const double* x, double* y);
}  // namespace scalar

#if defined(ADVEIG_BUILD_AVX2)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double dot3(const double* w, const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double* x, double a, std::size_t n);
double max_abs(const double* x, std::size_t n);
void spmv(const CsrView& m, const double* x, double* y);
}  // namespace avx2
#endif

#if defined(ADVEIG_BUILD_NEON)
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
double dot3(const double* w, const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double* x, double a, std::size_t n);
double max_abs(const double* x, std::size_t n);
void spmv(const CsrView& m, const double* x, double* y);
}  // namespace neon
#endif

}  // namespace adveig::kernels
