#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace epimob::kernels {

namespace {

bool host_has_avx2() {
#if defined(EPIMOB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& table_for(Isa isa) {
#if defined(EPIMOB_HAVE_AVX2)
    if (isa == Isa::avx2) return avx2::table();
#endif
    (void)isa;
    return scalar::table();
}

const KernelTable* initial_table() {
    Isa isa = detect_best_isa();
    if (const char* env = std::getenv("EPIMOB_ISA")) {
        const std::string want(env);
        if (want == "scalar") isa = Isa::scalar;
        else if (want == "avx2" && isa_available(Isa::avx2)) isa = Isa::avx2;
    }
    return &table_for(isa);
}

std::atomic<const KernelTable*>& selected() {
    static std::atomic<const KernelTable*> current{initial_table()};
    return current;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable& scalar_table() { return scalar::table(); }

const KernelTable* avx2_table() {
    if (!isa_available(Isa::avx2)) return nullptr;
    return &table_for(Isa::avx2);
}

bool isa_available(Isa isa) {
    if (isa == Isa::scalar) return true;
    static const bool avx2 = host_has_avx2();
    return avx2;
}

Isa detect_best_isa() { return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

const KernelTable& active() { return *selected().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) {
    if (!isa_available(isa)) return false;
    selected().store(&table_for(isa), std::memory_order_relaxed);
    return true;
}

}  // namespace epimob::kernels
