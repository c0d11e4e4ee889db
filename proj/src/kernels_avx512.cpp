#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>

#include "pvpbal/kernels/scalar_impl.hpp"
#include "pvpbal/kernels/variants.hpp"

#define PVPBAL_AVX512 __attribute__((target("avx512f")))

namespace pvpbal::kernels::detail {

namespace {

PVPBAL_AVX512 inline void gemm_row512_f32(float* crow, const float* arow, const float* b, int k,
                                          int n) {
    int j = 0;
    for (; j + 64 <= n; j += 64) {
        __m512 c0 = _mm512_loadu_ps(crow + j);
        __m512 c1 = _mm512_loadu_ps(crow + j + 16);
        __m512 c2 = _mm512_loadu_ps(crow + j + 32);
        __m512 c3 = _mm512_loadu_ps(crow + j + 48);
        for (int kk = 0; kk < k; ++kk) {
            const __m512 av = _mm512_set1_ps(arow[kk]);
            const float* brow = b + static_cast<std::size_t>(kk) * n + j;
            c0 = _mm512_fmadd_ps(av, _mm512_loadu_ps(brow), c0);
            c1 = _mm512_fmadd_ps(av, _mm512_loadu_ps(brow + 16), c1);
            c2 = _mm512_fmadd_ps(av, _mm512_loadu_ps(brow + 32), c2);
            c3 = _mm512_fmadd_ps(av, _mm512_loadu_ps(brow + 48), c3);
        }
        _mm512_storeu_ps(crow + j, c0);
        _mm512_storeu_ps(crow + j + 16, c1);
        _mm512_storeu_ps(crow + j + 32, c2);
        _mm512_storeu_ps(crow + j + 48, c3);
    }
    for (; j + 16 <= n; j += 16) {
        __m512 c0 = _mm512_loadu_ps(crow + j);
        for (int kk = 0; kk < k; ++kk) {
            const __m512 av = _mm512_set1_ps(arow[kk]);
            c0 = _mm512_fmadd_ps(av, _mm512_loadu_ps(b + static_cast<std::size_t>(kk) * n + j),
                                 c0);
        }
        _mm512_storeu_ps(crow + j, c0);
    }
    for (; j < n; ++j) {
        float acc = crow[j];
        for (int kk = 0; kk < k; ++kk)
            acc = std::fma(arow[kk], b[static_cast<std::size_t>(kk) * n + j], acc);
        crow[j] = acc;
    }
}

PVPBAL_AVX512 inline void gemm_row512_f64(double* crow, const double* arow, const double* b,
                                          int k, int n) {
    int j = 0;
    for (; j + 32 <= n; j += 32) {
        __m512d c0 = _mm512_loadu_pd(crow + j);
        __m512d c1 = _mm512_loadu_pd(crow + j + 8);
        __m512d c2 = _mm512_loadu_pd(crow + j + 16);
        __m512d c3 = _mm512_loadu_pd(crow + j + 24);
        for (int kk = 0; kk < k; ++kk) {
            const __m512d av = _mm512_set1_pd(arow[kk]);
            const double* brow = b + static_cast<std::size_t>(kk) * n + j;
            c0 = _mm512_fmadd_pd(av, _mm512_loadu_pd(brow), c0);
            c1 = _mm512_fmadd_pd(av, _mm512_loadu_pd(brow + 8), c1);
            c2 = _mm512_fmadd_pd(av, _mm512_loadu_pd(brow + 16), c2);
            c3 = _mm512_fmadd_pd(av, _mm512_loadu_pd(brow + 24), c3);
        }
        _mm512_storeu_pd(crow + j, c0);
        _mm512_storeu_pd(crow + j + 8, c1);
        _mm512_storeu_pd(crow + j + 16, c2);
        _mm512_storeu_pd(crow + j + 24, c3);
    }
    for (; j + 8 <= n; j += 8) {
        __m512d c0 = _mm512_loadu_pd(crow + j);
        for (int kk = 0; kk < k; ++kk) {
            const __m512d av = _mm512_set1_pd(arow[kk]);
            c0 = _mm512_fmadd_pd(av, _mm512_loadu_pd(b + static_cast<std::size_t>(kk) * n + j),
                                 c0);
        }
        _mm512_storeu_pd(crow + j, c0);
    }
    for (; j < n; ++j) {
        double acc = crow[j];
        for (int kk = 0; kk < k; ++kk)
            acc = std::fma(arow[kk], b[static_cast<std::size_t>(kk) * n + j], acc);
        crow[j] = acc;
    }
}

PVPBAL_AVX512 inline __m512 tanh_poly_avx512(__m512 x) {
    const __m512 clamp = _mm512_set1_ps(kTanhClamp);
    const __m512 xc =
        _mm512_min_ps(_mm512_max_ps(x, _mm512_sub_ps(_mm512_setzero_ps(), clamp)), clamp);
    const __m512 x2 = _mm512_mul_ps(xc, xc);
    __m512 p = _mm512_set1_ps(kTanhAlpha[6]);
    p = _mm512_fmadd_ps(x2, p, _mm512_set1_ps(kTanhAlpha[5]));
    p = _mm512_fmadd_ps(x2, p, _mm512_set1_ps(kTanhAlpha[4]));
    p = _mm512_fmadd_ps(x2, p, _mm512_set1_ps(kTanhAlpha[3]));
    p = _mm512_fmadd_ps(x2, p, _mm512_set1_ps(kTanhAlpha[2]));
    p = _mm512_fmadd_ps(x2, p, _mm512_set1_ps(kTanhAlpha[1]));
    p = _mm512_fmadd_ps(x2, p, _mm512_set1_ps(kTanhAlpha[0]));
    p = _mm512_mul_ps(xc, p);
    __m512 q = _mm512_fmadd_ps(x2, _mm512_set1_ps(kTanhBeta[3]), _mm512_set1_ps(kTanhBeta[2]));
    q = _mm512_fmadd_ps(x2, q, _mm512_set1_ps(kTanhBeta[1]));
    q = _mm512_fmadd_ps(x2, q, _mm512_set1_ps(kTanhBeta[0]));
    const __m512 r = _mm512_div_ps(p, q);
    const __m512 absx = _mm512_abs_ps(x);
    const __mmask16 use_x = _mm512_cmp_ps_mask(absx, _mm512_set1_ps(kTanhTiny), _CMP_LT_OQ);
    return _mm512_mask_mov_ps(r, use_x, x);
}

}  // namespace

void gemm_acc_avx512(float* c, const float* a, const float* b, int m, int k, int n) {
    for (int i = 0; i < m; ++i)
        gemm_row512_f32(c + static_cast<std::size_t>(i) * n, a + static_cast<std::size_t>(i) * k,
                        b, k, n);
}

void gemm_acc_avx512(double* c, const double* a, const double* b, int m, int k, int n) {
    for (int i = 0; i < m; ++i)
        gemm_row512_f64(c + static_cast<std::size_t>(i) * n, a + static_cast<std::size_t>(i) * k,
                        b, k, n);
}

PVPBAL_AVX512 void gemm_tn_acc_avx512(float* c, const float* a, const float* b, int m, int k,
                                      int n) {
    for (int i = 0; i < m; ++i) {
        const float* arow = a + static_cast<std::size_t>(i) * k;
        const float* brow = b + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const float av = arow[kk];
            float* crow = c + static_cast<std::size_t>(kk) * n;
            const __m512 avv = _mm512_set1_ps(av);
            int j = 0;
            for (; j + 16 <= n; j += 16)
                _mm512_storeu_ps(crow + j, _mm512_fmadd_ps(avv, _mm512_loadu_ps(brow + j),
                                                           _mm512_loadu_ps(crow + j)));
            for (; j < n; ++j) crow[j] = std::fma(av, brow[j], crow[j]);
        }
    }
}

PVPBAL_AVX512 void gemm_tn_acc_avx512(double* c, const double* a, const double* b, int m, int k,
                                      int n) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        const double* brow = b + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            double* crow = c + static_cast<std::size_t>(kk) * n;
            const __m512d avv = _mm512_set1_pd(av);
            int j = 0;
            for (; j + 8 <= n; j += 8)
                _mm512_storeu_pd(crow + j, _mm512_fmadd_pd(avv, _mm512_loadu_pd(brow + j),
                                                           _mm512_loadu_pd(crow + j)));
            for (; j < n; ++j) crow[j] = std::fma(av, brow[j], crow[j]);
        }
    }
}

PVPBAL_AVX512 void axpy_avx512(float* y, float alpha, const float* x, int n) {
    const __m512 av = _mm512_set1_ps(alpha);
    int j = 0;
    for (; j + 16 <= n; j += 16)
        _mm512_storeu_ps(y + j,
                         _mm512_fmadd_ps(av, _mm512_loadu_ps(x + j), _mm512_loadu_ps(y + j)));
    for (; j < n; ++j) y[j] = std::fma(alpha, x[j], y[j]);
}

PVPBAL_AVX512 void axpy_avx512(double* y, double alpha, const double* x, int n) {
    const __m512d av = _mm512_set1_pd(alpha);
    int j = 0;
    for (; j + 8 <= n; j += 8)
        _mm512_storeu_pd(y + j,
                         _mm512_fmadd_pd(av, _mm512_loadu_pd(x + j), _mm512_loadu_pd(y + j)));
    for (; j < n; ++j) y[j] = std::fma(alpha, x[j], y[j]);
}

PVPBAL_AVX512 void tanh_map_avx512(float* y, const float* x, int n) {
    int j = 0;
    for (; j + 16 <= n; j += 16) _mm512_storeu_ps(y + j, tanh_poly_avx512(_mm512_loadu_ps(x + j)));
    for (; j < n; ++j) y[j] = tanh_poly_f32(x[j]);
}

void tanh_map_avx512(double* y, const double* x, int n) {
    tanh_map_scalar(y, x, n);
}

PVPBAL_AVX512 void tanh_backward_avx512(float* dx, const float* dy, const float* y, int n) {
    const __m512 one = _mm512_set1_ps(1.0f);
    int j = 0;
    for (; j + 16 <= n; j += 16) {
        const __m512 yv = _mm512_loadu_ps(y + j);
        const __m512 t = _mm512_fnmadd_ps(yv, yv, one);
        _mm512_storeu_ps(dx + j, _mm512_mul_ps(_mm512_loadu_ps(dy + j), t));
    }
    for (; j < n; ++j) dx[j] = dy[j] * std::fma(-y[j], y[j], 1.0f);
}

PVPBAL_AVX512 void tanh_backward_avx512(double* dx, const double* dy, const double* y, int n) {
    const __m512d one = _mm512_set1_pd(1.0);
    int j = 0;
    for (; j + 8 <= n; j += 8) {
        const __m512d yv = _mm512_loadu_pd(y + j);
        const __m512d t = _mm512_fnmadd_pd(yv, yv, one);
        _mm512_storeu_pd(dx + j, _mm512_mul_pd(_mm512_loadu_pd(dy + j), t));
    }
    for (; j < n; ++j) dx[j] = dy[j] * std::fma(-y[j], y[j], 1.0);
}

PVPBAL_AVX512 void adam_update_avx512(float* p, float* m, float* v, const float* g, int n,
                                      float lr, float beta1, float beta2, float eps, float bias1,
                                      float bias2) {
    const __m512 b1 = _mm512_set1_ps(beta1);
    const __m512 b2 = _mm512_set1_ps(beta2);
    const __m512 om1 = _mm512_set1_ps(1.0f - beta1);
    const __m512 om2 = _mm512_set1_ps(1.0f - beta2);
    const __m512 lrv = _mm512_set1_ps(lr);
    const __m512 epsv = _mm512_set1_ps(eps);
    const __m512 c1 = _mm512_set1_ps(bias1);
    const __m512 c2 = _mm512_set1_ps(bias2);
    int j = 0;
    for (; j + 16 <= n; j += 16) {
        const __m512 gj = _mm512_loadu_ps(g + j);
        const __m512 mj = _mm512_fmadd_ps(b1, _mm512_loadu_ps(m + j), _mm512_mul_ps(om1, gj));
        const __m512 vj = _mm512_fmadd_ps(b2, _mm512_loadu_ps(v + j),
                                          _mm512_mul_ps(om2, _mm512_mul_ps(gj, gj)));
        _mm512_storeu_ps(m + j, mj);
        _mm512_storeu_ps(v + j, vj);
        const __m512 den = _mm512_add_ps(_mm512_sqrt_ps(_mm512_mul_ps(vj, c2)), epsv);
        const __m512 upd = _mm512_div_ps(_mm512_mul_ps(lrv, _mm512_mul_ps(mj, c1)), den);
        _mm512_storeu_ps(p + j, _mm512_sub_ps(_mm512_loadu_ps(p + j), upd));
    }
    if (j < n) adam_update_scalar(p + j, m + j, v + j, g + j, n - j, lr, beta1, beta2, eps, bias1,
                                  bias2);
}

PVPBAL_AVX512 void adam_update_avx512(double* p, double* m, double* v, const double* g, int n,
                                      double lr, double beta1, double beta2, double eps,
                                      double bias1, double bias2) {
    const __m512d b1 = _mm512_set1_pd(beta1);
    const __m512d b2 = _mm512_set1_pd(beta2);
    const __m512d om1 = _mm512_set1_pd(1.0 - beta1);
    const __m512d om2 = _mm512_set1_pd(1.0 - beta2);
    const __m512d lrv = _mm512_set1_pd(lr);
    const __m512d epsv = _mm512_set1_pd(eps);
    const __m512d c1 = _mm512_set1_pd(bias1);
    const __m512d c2 = _mm512_set1_pd(bias2);
    int j = 0;
    for (; j + 8 <= n; j += 8) {
        const __m512d gj = _mm512_loadu_pd(g + j);
        const __m512d mj = _mm512_fmadd_pd(b1, _mm512_loadu_pd(m + j), _mm512_mul_pd(om1, gj));
        const __m512d vj = _mm512_fmadd_pd(b2, _mm512_loadu_pd(v + j),
                                           _mm512_mul_pd(om2, _mm512_mul_pd(gj, gj)));
        _mm512_storeu_pd(m + j, mj);
        _mm512_storeu_pd(v + j, vj);
        const __m512d den = _mm512_add_pd(_mm512_sqrt_pd(_mm512_mul_pd(vj, c2)), epsv);
        const __m512d upd = _mm512_div_pd(_mm512_mul_pd(lrv, _mm512_mul_pd(mj, c1)), den);
        _mm512_storeu_pd(p + j, _mm512_sub_pd(_mm512_loadu_pd(p + j), upd));
    }
    if (j < n) adam_update_scalar(p + j, m + j, v + j, g + j, n - j, lr, beta1, beta2, eps, bias1,
                                  bias2);
}

}  // namespace pvpbal::kernels::detail

#endif  // x86
