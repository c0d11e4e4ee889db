#pragma once

#include <cstddef>

// Data-parallel inner loops behind the network substrate. Each operation has
// a scalar reference implementation plus AVX2/AVX-512 variants selected once
// at startup (override with PVPBAL_KERNELS=scalar|avx2|avx512).
//
// Variants are bitwise-equivalent, not merely close: every kernel is defined
// as a fixed sequence of correctly-rounded IEEE ops (fma/mul/add/div/sqrt)
// applied elementwise, and SIMD versions vectorize across elements without
// reassociating any reduction. Training results therefore do not depend on
// which variant the dispatcher picks.
namespace pvpbal::kernels {

enum class Isa { scalar, avx2, avx512 };

// ISA in effect for all dispatched kernels.
Isa active_isa();
const char* isa_name(Isa isa);
// Overrides dispatch; used by the equivalence tests. Returns previous ISA.
Isa force_isa(Isa isa);
bool cpu_supports(Isa isa);

// Row-major throughout.
// C[M][N] += A[M][K] * B[K][N]
template <typename T>
void gemm_acc(T* c, const T* a, const T* b, int m, int k, int n);

// C[K][N] += A^T * B  for A[M][K], B[M][N] (weight-gradient shape).
template <typename T>
void gemm_tn_acc(T* c, const T* a, const T* b, int m, int k, int n);

// y += alpha * x
template <typename T>
void axpy(T* y, T alpha, const T* x, int n);

// y[i] = tanh(x[i]). double uses libm tanh; float uses a rational
// approximation (identical polynomial in scalar and SIMD paths).
template <typename T>
void tanh_map(T* y, const T* x, int n);

// dx[i] = dy[i] * (1 - y[i]^2), y being the cached tanh output.
template <typename T>
void tanh_backward(T* dx, const T* dy, const T* y, int n);

// In-place Adam update for one parameter block. bias1/bias2 are the
// precomputed 1/(1-beta^t) correction factors.
template <typename T>
void adam_update(T* p, T* m, T* v, const T* g, int n, T lr, T beta1, T beta2, T eps, T bias1,
                 T bias2);

// Scalar helpers (single implementation, no dispatch).
template <typename T>
bool all_finite(const T* x, std::size_t n);

extern template void gemm_acc<float>(float*, const float*, const float*, int, int, int);
extern template void gemm_acc<double>(double*, const double*, const double*, int, int, int);
extern template void gemm_tn_acc<float>(float*, const float*, const float*, int, int, int);
extern template void gemm_tn_acc<double>(double*, const double*, const double*, int, int, int);
extern template void axpy<float>(float*, float, const float*, int);
extern template void axpy<double>(double*, double, const double*, int);
extern template void tanh_map<float>(float*, const float*, int);
extern template void tanh_map<double>(double*, const double*, int);
extern template void tanh_backward<float>(float*, const float*, const float*, int);
extern template void tanh_backward<double>(double*, const double*, const double*, int);
extern template void adam_update<float>(float*, float*, float*, const float*, int, float, float,
                                        float, float, float, float);
extern template void adam_update<double>(double*, double*, double*, const double*, int, double,
                                         double, double, double, double, double);
extern template bool all_finite<float>(const float*, std::size_t);
extern template bool all_finite<double>(const double*, std::size_t);

}  // namespace pvpbal::kernels
