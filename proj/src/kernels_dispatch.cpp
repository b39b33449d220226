#include <atomic>
#include <stdexcept>

#include "drlsim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#define DRLSIM_X86 1
#endif

namespace drlsim::kernels {

const Ops& scalar_ops();
#ifdef DRLSIM_AVX2_TU
const Ops& avx2_ops();
#endif

bool cpu_supports_avx2() {
#if defined(DRLSIM_X86) && defined(DRLSIM_AVX2_TU)
    unsigned eax, ebx, ecx, edx;
    if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
    const bool avx2 = (ebx & bit_AVX2) != 0;
    if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
    const bool fma = (ecx & bit_FMA) != 0;
    return avx2 && fma;
#else
    return false;
#endif
}

namespace {

Isa detect() { return cpu_supports_avx2() ? Isa::avx2 : Isa::scalar; }

std::atomic<Isa>& selected() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

const Ops& ops(Isa which) {
    switch (which) {
        case Isa::scalar:
            return scalar_ops();
        case Isa::avx2:
#ifdef DRLSIM_AVX2_TU
            if (cpu_supports_avx2()) return avx2_ops();
#endif
            throw std::runtime_error("avx2 kernels unavailable on this CPU/build");
    }
    return scalar_ops();
}

const Ops& ops() { return ops(selected().load(std::memory_order_relaxed)); }

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

void force_isa(Isa which) {
    ops(which);  // validates availability
    selected().store(which, std::memory_order_relaxed);
}

}  // namespace drlsim::kernels
