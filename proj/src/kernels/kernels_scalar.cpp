#include "kernels_impl.hpp"

namespace mbl::kernels::scalar {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda, const double *b,
             std::size_t ldb, double *c, std::size_t ldc) {
    for(std::size_t j = 0; j < n; ++j) {
        double *cj = c + j * ldc;
        for(std::size_t i = 0; i < m; ++i) cj[i] = 0.0;
        for(std::size_t p = 0; p < k; ++p) {
            const double  bpj = b[p + j * ldb];
            const double *ap  = a + p * lda;
            for(std::size_t i = 0; i < m; ++i) cj[i] += ap[i] * bpj;
        }
    }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda, const double *b,
             std::size_t ldb, double *c, std::size_t ldc) {
    for(std::size_t j = 0; j < n; ++j) {
        const double *bj = b + j * ldb;
        for(std::size_t i = 0; i < m; ++i) {
            const double *ai  = a + i * lda;
            double        acc = 0.0;
            for(std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            c[i + j * ldc] = acc;
        }
    }
}

void rotate_phases(std::size_t n, const double *cos_t, const double *sin_t, const double *in_re,
                   const double *in_im, double *out_re, double *out_im) {
    for(std::size_t i = 0; i < n; ++i) {
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
            const double *rb = p_re + b * ld;
            const double *ib = p_im + b * ld;
            double        re = 0.0;
            double        im = 0.0;
            for(std::size_t e = 0; e < cols; ++e) {
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

} // namespace mbl::kernels::scalar
