// Compiled with -mavx2 -mfma; only reached through the dispatch table after a CPU check.
#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>

namespace mbl::kernels::avx2 {

namespace {

constexpr std::size_t kc_block = 256;
constexpr std::size_t mc_block = 128;

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo         = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// C[0:8, 0:NC] += A[0:8, 0:kc] * B[0:kc, 0:NC]
template<int NC>
inline void micro_8(std::size_t kc, const double *a, std::size_t lda, const double *b, std::size_t ldb, double *c,
                    std::size_t ldc) {
    __m256d acc0[NC], acc1[NC];
    for(int j = 0; j < NC; ++j) {
        acc0[j] = _mm256_loadu_pd(c + j * ldc);
        acc1[j] = _mm256_loadu_pd(c + j * ldc + 4);
    }
    for(std::size_t p = 0; p < kc; ++p) {
        const __m256d a0 = _mm256_loadu_pd(a + p * lda);
        const __m256d a1 = _mm256_loadu_pd(a + p * lda + 4);
        for(int j = 0; j < NC; ++j) {
            const __m256d bv = _mm256_broadcast_sd(b + p + j * ldb);
            acc0[j]          = _mm256_fmadd_pd(a0, bv, acc0[j]);
            acc1[j]          = _mm256_fmadd_pd(a1, bv, acc1[j]);
        }
    }
    for(int j = 0; j < NC; ++j) {
        _mm256_storeu_pd(c + j * ldc, acc0[j]);
        _mm256_storeu_pd(c + j * ldc + 4, acc1[j]);
    }
}

template<int NC>
inline void micro_4(std::size_t kc, const double *a, std::size_t lda, const double *b, std::size_t ldb, double *c,
                    std::size_t ldc) {
    __m256d acc[NC];
    for(int j = 0; j < NC; ++j) acc[j] = _mm256_loadu_pd(c + j * ldc);
    for(std::size_t p = 0; p < kc; ++p) {
        const __m256d a0 = _mm256_loadu_pd(a + p * lda);
        for(int j = 0; j < NC; ++j) acc[j] = _mm256_fmadd_pd(a0, _mm256_broadcast_sd(b + p + j * ldb), acc[j]);
    }
    for(int j = 0; j < NC; ++j) _mm256_storeu_pd(c + j * ldc, acc[j]);
}

template<int NC>
void panel(std::size_t mr, std::size_t kc, const double *a, std::size_t lda, const double *b, std::size_t ldb,
           double *c, std::size_t ldc) {
    std::size_t i = 0;
    for(; i + 8 <= mr; i += 8) micro_8<NC>(kc, a + i, lda, b, ldb, c + i, ldc);
    for(; i + 4 <= mr; i += 4) micro_4<NC>(kc, a + i, lda, b, ldb, c + i, ldc);
    for(; i < mr; ++i) {
        for(int j = 0; j < NC; ++j) {
            double acc = c[i + j * ldc];
            for(std::size_t p = 0; p < kc; ++p) acc += a[i + p * lda] * b[p + j * ldb];
            c[i + j * ldc] = acc;
        }
    }
}

} // namespace

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda, const double *b,
             std::size_t ldb, double *c, std::size_t ldc) {
    for(std::size_t j = 0; j < n; ++j) std::fill_n(c + j * ldc, m, 0.0);
    for(std::size_t pc = 0; pc < k; pc += kc_block) {
        const std::size_t kc = std::min(kc_block, k - pc);
        for(std::size_t ic = 0; ic < m; ic += mc_block) {
            const std::size_t mr = std::min(mc_block, m - ic);
            const double     *ab = a + ic + pc * lda;
            std::size_t       j  = 0;
            for(; j + 4 <= n; j += 4) panel<4>(mr, kc, ab, lda, b + pc + j * ldb, ldb, c + ic + j * ldc, ldc);
            for(; j < n; ++j) panel<1>(mr, kc, ab, lda, b + pc + j * ldb, ldb, c + ic + j * ldc, ldc);
        }
    }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda, const double *b,
             std::size_t ldb, double *c, std::size_t ldc) {
    for(std::size_t j = 0; j < n; ++j) {
        const double *bj = b + j * ldb;
        for(std::size_t i = 0; i < m; ++i) {
            const double *ai   = a + i * lda;
            __m256d       acc0 = _mm256_setzero_pd();
            __m256d       acc1 = _mm256_setzero_pd();
            std::size_t   p    = 0;
            for(; p + 8 <= k; p += 8) {
                acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + p), _mm256_loadu_pd(bj + p), acc0);
                acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + p + 4), _mm256_loadu_pd(bj + p + 4), acc1);
            }
            double acc = hsum(_mm256_add_pd(acc0, acc1));
            for(; p < k; ++p) acc += ai[p] * bj[p];
            c[i + j * ldc] = acc;
        }
    }
}

void rotate_phases(std::size_t n, const double *cos_t, const double *sin_t, const double *in_re,
                   const double *in_im, double *out_re, double *out_im) {
    std::size_t i = 0;
    for(; i + 4 <= n; i += 4) {
        const __m256d c  = _mm256_loadu_pd(cos_t + i);
        const __m256d s  = _mm256_loadu_pd(sin_t + i);
        const __m256d re = _mm256_loadu_pd(in_re + i);
        const __m256d im = _mm256_loadu_pd(in_im + i);
        _mm256_storeu_pd(out_re + i, _mm256_fmadd_pd(re, c, _mm256_mul_pd(im, s)));
        _mm256_storeu_pd(out_im + i, _mm256_fmsub_pd(im, c, _mm256_mul_pd(re, s)));
    }
    for(; i < n; ++i) {
        const double re = in_re[i];
        const double im = in_im[i];
        out_re[i]       = re * cos_t[i] + im * sin_t[i];
        out_im[i]       = im * cos_t[i] - re * sin_t[i];
    }
}

void gram_hermitian(std::size_t rows, std::size_t cols, const double *p_re, const double *p_im, std::size_t ld,
                    double *out_re, double *out_im) {
    for(std::size_t a = 0; a < rows; ++a) {
        const double *ra = p_re + a * ld;
        const double *ia = p_im + a * ld;
        for(std::size_t b = 0; b <= a; ++b) {
            const double *rb   = p_re + b * ld;
            const double *ib   = p_im + b * ld;
            __m256d       accr = _mm256_setzero_pd();
            __m256d       acci = _mm256_setzero_pd();
            std::size_t   e    = 0;
            for(; e + 4 <= cols; e += 4) {
                const __m256d xr = _mm256_loadu_pd(ra + e);
                const __m256d xi = _mm256_loadu_pd(ia + e);
                const __m256d yr = _mm256_loadu_pd(rb + e);
                const __m256d yi = _mm256_loadu_pd(ib + e);
                accr             = _mm256_fmadd_pd(xr, yr, _mm256_fmadd_pd(xi, yi, accr));
                acci             = _mm256_fmadd_pd(xi, yr, _mm256_fnmadd_pd(xr, yi, acci));
            }
            double re = hsum(accr);
            double im = hsum(acci);
            for(; e < cols; ++e) {
                re += ra[e] * rb[e] + ia[e] * ib[e];
                im += ia[e] * rb[e] - ra[e] * ib[e];
            }
            out_re[a + b * rows] = re;
            out_im[a + b * rows] = im;
            out_re[b + a * rows] = re;
            out_im[b + a * rows] = -im;
        }
    }
}

} // namespace mbl::kernels::avx2
