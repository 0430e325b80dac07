#pragma once

// Dense double-precision inner loops used by the solvers and integrators.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is picked once at startup from CPUID and can
// be overridden with EPIMOB_ISA=scalar|avx2 or set_isa(). Results of the two
// variants agree to rounding (FMA and lane-wise summation change the last
// bits), which the equivalence tests pin down.

#include <cstddef>
#include <span>
#include <string_view>

namespace epimob::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Table of kernel entry points for one instruction set.
struct KernelTable {
    Isa isa;

    double (*dot)(const double* a, const double* b, std::size_t n);

    // y = A x with A row-major rows x cols.
    void (*matvec)(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y);

    // y1 = A x1 and y2 = A x2 in one sweep over A.
    void (*matvec2)(const double* a, std::size_t rows, std::size_t cols,
                    const double* x1, const double* x2, double* y1, double* y2);

    // y += alpha x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

    // out = y0 + alpha x
    void (*shifted)(const double* y0, double alpha, const double* x, double* out,
                    std::size_t n);

    // out = y0 + h/6 (k1 + 2 k2 + 2 k3 + k4)
    void (*rk4_combine)(const double* y0, const double* k1, const double* k2,
                        const double* k3, const double* k4, double h, double* out,
                        std::size_t n);

    // Local SIS reaction plus mobility exchange:
    //   dp_i = -delta_i p_i + beta_i p_i (1 - p_i) + (flow_p_i - p_i flow_x_i) / x_i
    // where flow_p = Q^T (x .* p) and flow_x = Q^T x.
    void (*sis_reaction)(const double* p, const double* x, const double* beta,
                         const double* delta, const double* flow_p,
                         const double* flow_x, double* dp, std::size_t n);

    // out_i = a_i * b_i
    void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);

    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);

    double (*max_abs)(const double* a, std::size_t n);

    // Smallest and largest num_i / den_i over i (den_i > 0).
    void (*ratio_bounds)(const double* num, const double* den, std::size_t n,
                         double* lo, double* hi);
};

const KernelTable& scalar_table();

/// Null when the build or the host lacks AVX2/FMA.
const KernelTable* avx2_table();

bool isa_available(Isa isa);

/// Currently selected table.
const KernelTable& active();

/// Force an instruction set. Returns false (and leaves the selection alone)
/// when it is unavailable on this host.
bool set_isa(Isa isa);

Isa detect_best_isa();

// Span conveniences over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return active().max_abs_diff(a.data(), b.data(), a.size());
}

inline double max_abs(std::span<const double> a) {
    return active().max_abs(a.data(), a.size());
}

}  // namespace epimob::kernels
