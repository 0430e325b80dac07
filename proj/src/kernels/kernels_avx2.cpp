// Compiled with -mavx2 -mfma. Only reached after a CPUID check.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace epimob::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

inline double hmin(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_min_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                               acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x,
            double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void matvec2(const double* a, std::size_t rows, std::size_t cols, const double* x1,
             const double* x2, double* y1, double* y2) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        __m256d acc1 = _mm256_setzero_pd();
        __m256d acc2 = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            const __m256d av = _mm256_loadu_pd(row + c);
            acc1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(x1 + c), acc1);
            acc2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(x2 + c), acc2);
        }
        double s1 = hsum(acc1);
        double s2 = hsum(acc2);
        for (; c < cols; ++c) {
            s1 += row[c] * x1[c];
            s2 += row[c] * x2[c];
        }
        y1[r] = s1;
        y2[r] = s2;
    }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void shifted(const double* y0, double alpha, const double* x, double* out,
             std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                                  _mm256_loadu_pd(y0 + i)));
    for (; i < n; ++i) out[i] = y0[i] + alpha * x[i];
}

void rk4_combine(const double* y0, const double* k1, const double* k2,
                 const double* k3, const double* k4, double h, double* out,
                 std::size_t n) {
    const double w = h / 6.0;
    const __m256d vw = _mm256_set1_pd(w);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mid = _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i));
        const __m256d ends = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
        const __m256d sum = _mm256_fmadd_pd(two, mid, ends);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vw, sum, _mm256_loadu_pd(y0 + i)));
    }
    for (; i < n; ++i)
        out[i] = y0[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void sis_reaction(const double* p, const double* x, const double* beta,
                  const double* delta, const double* flow_p, const double* flow_x,
                  double* dp, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vp = _mm256_loadu_pd(p + i);
        const __m256d vb = _mm256_loadu_pd(beta + i);
        const __m256d vd = _mm256_loadu_pd(delta + i);
        // p (beta (1 - p) - delta)
        const __m256d rate = _mm256_sub_pd(_mm256_mul_pd(vb, _mm256_sub_pd(one, vp)), vd);
        const __m256d local = _mm256_mul_pd(vp, rate);
        // flow_p - p flow_x
        const __m256d exch =
            _mm256_fnmadd_pd(vp, _mm256_loadu_pd(flow_x + i), _mm256_loadu_pd(flow_p + i));
        _mm256_storeu_pd(dp + i, _mm256_add_pd(local, _mm256_div_pd(exch, _mm256_loadu_pd(x + i))));
    }
    for (; i < n; ++i) {
        const double local = -delta[i] * p[i] + beta[i] * p[i] * (1.0 - p[i]);
        dp[i] = local + (flow_p[i] - p[i] * flow_x[i]) / x[i];
    }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        m = _mm256_max_pd(m, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
    double r = hmax(m);
    for (; i < n; ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

double max_abs(const double* a, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(a + i)));
    double r = hmax(m);
    for (; i < n; ++i) r = std::max(r, std::abs(a[i]));
    return r;
}

void ratio_bounds(const double* num, const double* den, std::size_t n, double* lo,
                  double* hi) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    __m256d vlo = _mm256_set1_pd(inf);
    __m256d vhi = _mm256_set1_pd(-inf);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_div_pd(_mm256_loadu_pd(num + i), _mm256_loadu_pd(den + i));
        vlo = _mm256_min_pd(vlo, r);
        vhi = _mm256_max_pd(vhi, r);
    }
    double l = hmin(vlo);
    double h = hmax(vhi);
    for (; i < n; ++i) {
        const double r = num[i] / den[i];
        l = std::min(l, r);
        h = std::max(h, r);
    }
    *lo = l;
    *hi = h;
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{
        Isa::avx2,   dot,          matvec,   matvec2,      axpy,    shifted,
        rk4_combine, sis_reaction, hadamard, max_abs_diff, max_abs, ratio_bounds,
    };
    return t;
}

}  // namespace epimob::kernels::avx2
