#include "mbl/kernels.hpp"

#include "kernels_impl.hpp"
#include "mbl/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace mbl::kernels {

namespace {

const KernelTable scalar_kernels{Backend::scalar, scalar::gemm_nn, scalar::gemm_tn, scalar::rotate_phases,
                                 scalar::gram_hermitian};

#if defined(MBL_HAVE_AVX2_KERNELS)
const KernelTable avx2_kernels{Backend::avx2, avx2::gemm_nn, avx2::gemm_tn, avx2::rotate_phases,
                               avx2::gram_hermitian};
#endif

const KernelTable *resolve_initial() {
    Backend backend = detect_backend();
    if(const char *env = std::getenv("MBL_KERNELS"); env != nullptr && *env != '\0') {
        try {
            const Backend requested = parse_backend(env);
            if(available(requested)) backend = requested;
        } catch(const DomainError &) {
            // unknown names fall back to detection
        }
    }
    return backend == Backend::avx2 ? &avx2_table() : &scalar_table();
}

std::atomic<const KernelTable *> &active_slot() {
    static std::atomic<const KernelTable *> slot{resolve_initial()};
    return slot;
}

} // namespace

const KernelTable &scalar_table() { return scalar_kernels; }

const KernelTable &avx2_table() {
#if defined(MBL_HAVE_AVX2_KERNELS)
    return avx2_kernels;
#else
    throw DomainError("AVX2 kernels were not compiled into this build");
#endif
}

bool available(Backend backend) {
    switch(backend) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(MBL_HAVE_AVX2_KERNELS)
            __builtin_cpu_init();
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

Backend detect_backend() { return available(Backend::avx2) ? Backend::avx2 : Backend::scalar; }

const KernelTable &active() { return *active_slot().load(std::memory_order_acquire); }

void set_backend(Backend backend) {
    if(!available(backend)) throw DomainError("kernel backend '" + std::string(name(backend)) + "' is not available");
    active_slot().store(backend == Backend::avx2 ? &avx2_table() : &scalar_table(), std::memory_order_release);
}

std::string_view name(Backend backend) {
    switch(backend) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

Backend parse_backend(std::string_view text) {
    if(text == "scalar") return Backend::scalar;
    if(text == "avx2") return Backend::avx2;
    throw DomainError("unknown kernel backend '" + std::string(text) + "'");
}

} // namespace mbl::kernels
