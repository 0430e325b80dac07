#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epimob::kernels::scalar {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
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
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            s1 += row[c] * x1[c];
            s2 += row[c] * x2[c];
        }
        y1[r] = s1;
        y2[r] = s2;
    }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void shifted(const double* y0, double alpha, const double* x, double* out,
             std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = y0[i] + alpha * x[i];
}

void rk4_combine(const double* y0, const double* k1, const double* k2,
                 const double* k3, const double* k4, double h, double* out,
                 std::size_t n) {
    const double w = h / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y0[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void sis_reaction(const double* p, const double* x, const double* beta,
                  const double* delta, const double* flow_p, const double* flow_x,
                  double* dp, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double local = -delta[i] * p[i] + beta[i] * p[i] * (1.0 - p[i]);
        dp[i] = local + (flow_p[i] - p[i] * flow_x[i]) / x[i];
    }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

void ratio_bounds(const double* num, const double* den, std::size_t n, double* lo,
                  double* hi) {
    double l = std::numeric_limits<double>::infinity();
    double h = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
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
        Isa::scalar, dot,      matvec,      matvec2,      axpy,    shifted,
        rk4_combine, sis_reaction, hadamard, max_abs_diff, max_abs, ratio_bounds,
    };
    return t;
}

}  // namespace epimob::kernels::scalar
