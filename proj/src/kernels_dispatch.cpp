#include "pvpbal/kernels/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "pvpbal/kernels/scalar_impl.hpp"
#include "pvpbal/kernels/variants.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define PVPBAL_X86 1
#else
#define PVPBAL_X86 0
#endif

namespace pvpbal::kernels {

namespace {

bool isa_available(Isa isa) {
#if PVPBAL_X86
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
        case Isa::avx512:
            return __builtin_cpu_supports("avx512f");
    }
    return false;
#else
    return isa == Isa::scalar;
#endif
}

Isa resolve() {
    if (const char* env = std::getenv("PVPBAL_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0 && isa_available(Isa::avx2)) return Isa::avx2;
        if (std::strcmp(env, "avx512") == 0 && isa_available(Isa::avx512)) return Isa::avx512;
    }
    if (isa_available(Isa::avx512)) return Isa::avx512;
    if (isa_available(Isa::avx2)) return Isa::avx2;
    return Isa::scalar;
}

Isa g_isa = resolve();

}  // namespace

Isa active_isa() { return g_isa; }

bool cpu_supports(Isa isa) { return isa_available(isa); }

Isa force_isa(Isa isa) {
    const Isa prev = g_isa;
    if (isa_available(isa)) g_isa = isa;
    return prev;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::avx512:
            return "avx512";
    }
    return "?";
}

#if PVPBAL_X86
#define PVPBAL_DISPATCH(fn, ...)                      \
    switch (g_isa) {                                  \
        case Isa::avx512:                             \
            detail::fn##_avx512(__VA_ARGS__);         \
            return;                                   \
        case Isa::avx2:                               \
            detail::fn##_avx2(__VA_ARGS__);           \
            return;                                   \
        case Isa::scalar:                             \
            detail::fn##_scalar(__VA_ARGS__);         \
            return;                                   \
    }                                                 \
    detail::fn##_scalar(__VA_ARGS__)
#else
#define PVPBAL_DISPATCH(fn, ...) detail::fn##_scalar(__VA_ARGS__)
#endif

template <typename T>
void gemm_acc(T* c, const T* a, const T* b, int m, int k, int n) {
    PVPBAL_DISPATCH(gemm_acc, c, a, b, m, k, n);
}

template <typename T>
void gemm_tn_acc(T* c, const T* a, const T* b, int m, int k, int n) {
    PVPBAL_DISPATCH(gemm_tn_acc, c, a, b, m, k, n);
}

template <typename T>
void axpy(T* y, T alpha, const T* x, int n) {
    PVPBAL_DISPATCH(axpy, y, alpha, x, n);
}

template <typename T>
void tanh_map(T* y, const T* x, int n) {
    PVPBAL_DISPATCH(tanh_map, y, x, n);
}

template <typename T>
void tanh_backward(T* dx, const T* dy, const T* y, int n) {
    PVPBAL_DISPATCH(tanh_backward, dx, dy, y, n);
}

template <typename T>
void adam_update(T* p, T* m, T* v, const T* g, int n, T lr, T beta1, T beta2, T eps, T bias1,
                 T bias2) {
    PVPBAL_DISPATCH(adam_update, p, m, v, g, n, lr, beta1, beta2, eps, bias1, bias2);
}

template <typename T>
bool all_finite(const T* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

template void gemm_acc<float>(float*, const float*, const float*, int, int, int);
template void gemm_acc<double>(double*, const double*, const double*, int, int, int);
template void gemm_tn_acc<float>(float*, const float*, const float*, int, int, int);
template void gemm_tn_acc<double>(double*, const double*, const double*, int, int, int);
template void axpy<float>(float*, float, const float*, int);
template void axpy<double>(double*, double, const double*, int);
template void tanh_map<float>(float*, const float*, int);
template void tanh_map<double>(double*, const double*, int);
template void tanh_backward<float>(float*, const float*, const float*, int);
template void tanh_backward<double>(double*, const double*, const double*, int);
template void adam_update<float>(float*, float*, float*, const float*, int, float, float, float,
                                 float, float, float);
template void adam_update<double>(double*, double*, double*, const double*, int, double, double,
                                  double, double, double, double);
template bool all_finite<float>(const float*, std::size_t);
template bool all_finite<double>(const double*, std::size_t);

}  // namespace pvpbal::kernels
