#pragma once

#include <cmath>
#include <cstddef>

// Reference kernel semantics. Each op is spelled as an explicit chain of
// correctly-rounded IEEE operations; the SIMD variants replicate the chain
// lane-by-lane, so equality with these implementations is exact.
namespace pvpbal::kernels::detail {

template <typename T>
inline T mul_add(T a, T b, T c) {
    return std::fma(a, b, c);
}

// Rational tanh approximation for float (the usual 13/6-degree minimax pair
// over [-7.905, 7.905], accurate to a few ulps). Shared by scalar and SIMD
// float paths; the double path uses libm tanh instead.
inline constexpr float kTanhClamp = 7.90531110763549805f;
inline constexpr float kTanhTiny = 0.0004f;
inline constexpr float kTanhAlpha[7] = {4.89352455891786e-03f, 6.37261928875436e-04f,
                                        1.48572235717979e-05f, 5.12229709037114e-08f,
                                        -8.60467152213735e-11f, 2.00018790482477e-13f,
                                        -2.76076847742355e-16f};
inline constexpr float kTanhBeta[4] = {4.89352518554385e-03f, 2.26843463243900e-03f,
                                       1.18534705686654e-04f, 1.19825839466702e-06f};

inline float tanh_poly_f32(float x) {
    const float xc = x < -kTanhClamp ? -kTanhClamp : (x > kTanhClamp ? kTanhClamp : x);
    const float x2 = xc * xc;
    float p = kTanhAlpha[6];
    p = mul_add(x2, p, kTanhAlpha[5]);
    p = mul_add(x2, p, kTanhAlpha[4]);
    p = mul_add(x2, p, kTanhAlpha[3]);
    p = mul_add(x2, p, kTanhAlpha[2]);
    p = mul_add(x2, p, kTanhAlpha[1]);
    p = mul_add(x2, p, kTanhAlpha[0]);
    p = xc * p;
    float q = mul_add(x2, kTanhBeta[3], kTanhBeta[2]);
    q = mul_add(x2, q, kTanhBeta[1]);
    q = mul_add(x2, q, kTanhBeta[0]);
    const float r = p / q;
    return std::fabs(x) < kTanhTiny ? x : r;
}

template <typename T>
void gemm_acc_scalar(T* c, const T* a, const T* b, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        T* crow = c + static_cast<std::size_t>(i) * n;
        const T* arow = a + static_cast<std::size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const T av = arow[kk];
            const T* brow = b + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] = mul_add(av, brow[j], crow[j]);
        }
    }
}

template <typename T>
void gemm_tn_acc_scalar(T* c, const T* a, const T* b, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const T* arow = a + static_cast<std::size_t>(i) * k;
        const T* brow = b + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const T av = arow[kk];
            T* crow = c + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] = mul_add(av, brow[j], crow[j]);
        }
    }
}

template <typename T>
void axpy_scalar(T* y, T alpha, const T* x, int n) {
    for (int j = 0; j < n; ++j) y[j] = mul_add(alpha, x[j], y[j]);
}

inline void tanh_map_scalar(float* y, const float* x, int n) {
    for (int j = 0; j < n; ++j) y[j] = tanh_poly_f32(x[j]);
}

inline void tanh_map_scalar(double* y, const double* x, int n) {
    for (int j = 0; j < n; ++j) y[j] = std::tanh(x[j]);
}

template <typename T>
void tanh_backward_scalar(T* dx, const T* dy, const T* y, int n) {
    for (int j = 0; j < n; ++j) {
        const T t = mul_add(-y[j], y[j], T(1));
        dx[j] = dy[j] * t;
    }
}

template <typename T>
void adam_update_scalar(T* p, T* m, T* v, const T* g, int n, T lr, T beta1, T beta2, T eps,
                        T bias1, T bias2) {
    const T om1 = T(1) - beta1;
    const T om2 = T(1) - beta2;
    for (int j = 0; j < n; ++j) {
        const T gj = g[j];
        const T mj = mul_add(beta1, m[j], om1 * gj);
        const T vj = mul_add(beta2, v[j], om2 * (gj * gj));
        m[j] = mj;
        v[j] = vj;
        const T mh = mj * bias1;
        const T vh = vj * bias2;
        const T den = std::sqrt(vh) + eps;
        p[j] = p[j] - (lr * mh) / den;
    }
}

}  // namespace pvpbal::kernels::detail
