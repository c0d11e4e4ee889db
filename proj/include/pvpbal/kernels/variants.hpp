#pragma once

// Internal: per-ISA entry points wired up by the dispatcher. Compiled with
// GCC/Clang target attributes, so the TU itself builds for the baseline arch
// and the binary stays runnable on any x86-64.
namespace pvpbal::kernels::detail {

#define PVPBAL_DECLARE_VARIANT(suffix)                                                      \
    void gemm_acc_##suffix(float*, const float*, const float*, int, int, int);             \
    void gemm_acc_##suffix(double*, const double*, const double*, int, int, int);          \
    void gemm_tn_acc_##suffix(float*, const float*, const float*, int, int, int);          \
    void gemm_tn_acc_##suffix(double*, const double*, const double*, int, int, int);       \
    void axpy_##suffix(float*, float, const float*, int);                                  \
    void axpy_##suffix(double*, double, const double*, int);                               \
    void tanh_map_##suffix(float*, const float*, int);                                     \
    void tanh_map_##suffix(double*, const double*, int);                                   \
    void tanh_backward_##suffix(float*, const float*, const float*, int);                  \
    void tanh_backward_##suffix(double*, const double*, const double*, int);               \
    void adam_update_##suffix(float*, float*, float*, const float*, int, float, float,     \
                              float, float, float, float);                                 \
    void adam_update_##suffix(double*, double*, double*, const double*, int, double,       \
                              double, double, double, double, double);

PVPBAL_DECLARE_VARIANT(avx2)
PVPBAL_DECLARE_VARIANT(avx512)

#undef PVPBAL_DECLARE_VARIANT

}  // namespace pvpbal::kernels::detail
