#pragma once

#include <cstddef>

namespace mbl::kernels::scalar {
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda, const double *b,
             std::size_t ldb, double *c, std::size_t ldc);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda, const double *b,
             std::size_t ldb, double *c, std::size_t ldc);
void rotate_phases(std::size_t n, const double *cos_t, const double *sin_t, const double *in_re,
                   const double *in_im, double *out_re, double *out_im);
void gram_hermitian(std::size_t rows, std::size_t cols, const double *p_re, const double *p_im, std::size_t ld,
                    double *out_re, double *out_im);
} // namespace mbl::kernels::scalar

#if defined(MBL_HAVE_AVX2_KERNELS)
namespace mbl::kernels::avx2 {
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda, const double *b,
             std::size_t ldb, double *c, std::size_t ldc);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda, const double *b,
             std::size_t ldb, double *c, std::size_t ldc);
void rotate_phases(std::size_t n, const double *cos_t, const double *sin_t, const double *in_re,
                   const double *in_im, double *out_re, double *out_im);
void gram_hermitian(std::size_t rows, std::size_t cols, const double *p_re, const double *p_im, std::size_t ld,
                    double *out_re, double *out_im);
} // namespace mbl::kernels::avx2
#endif
