#pragma once

// Data-parallel inner loops used by the propagation and reduction paths.
//
// Every kernel has a portable scalar reference implementation and, where the
// CPU supports it, an AVX2/FMA implementation. The active table is chosen once
// at startup from the CPU feature flags; MBL_KERNELS=scalar|avx2 overrides it.
// All matrices are column-major unless noted otherwise.

#include <cstddef>
#include <string_view>

namespace mbl::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
    Backend backend;

    // C (m x n) = A (m x k) * B (k x n).
    void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda,
                    const double *b, std::size_t ldb, double *c, std::size_t ldc);

    // C (m x n) = A^T * B with A stored as (k x m).
    void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double *a, std::size_t lda,
                    const double *b, std::size_t ldb, double *c, std::size_t ldc);

    // out = in * (cos - i sin), element-wise on split-complex arrays.
    void (*rotate_phases)(std::size_t n, const double *cos_t, const double *sin_t, const double *in_re,
                          const double *in_im, double *out_re, double *out_im);

    // out (rows x rows, column-major) = P P^dagger, where P is rows x cols split-complex
    // stored row-major with leading dimension ld. Only needs P's rows to be contiguous.
    void (*gram_hermitian)(std::size_t rows, std::size_t cols, const double *p_re, const double *p_im,
                           std::size_t ld, double *out_re, double *out_im);
};

const KernelTable &scalar_table();
const KernelTable &avx2_table(); // only call when available(Backend::avx2)

bool available(Backend backend);
Backend detect_backend();

// Table used by the library; resolved lazily on first use.
const KernelTable &active();
void set_backend(Backend backend); // throws DomainError when unavailable

std::string_view name(Backend backend);
Backend parse_backend(std::string_view text);

} // namespace mbl::kernels
