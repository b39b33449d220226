#pragma once

#include <cstddef>
#include <string_view>

namespace drlsim::kernels {

/// Dense inner loops behind the network math. Weights are stored as f32
/// (the checkpoint precision); every kernel widens to f64 before it
/// accumulates, so results stay oracle-grade while the weight arrays stay
/// compact. Each entry has a scalar reference implementation and an AVX2
/// variant selected once at startup; the two are equivalence-tested.
struct Ops {
    /// y[i] = bias[i] + sum_j w[i*cols + j] * x[j]
    void (*matvec)(const float* w, const double* x, const double* bias, double* y,
                   std::size_t rows, std::size_t cols);
    /// gx[j] += sum_i w[i*cols + j] * gy[i]   (transpose apply, accumulating)
    void (*matvec_t_acc)(const float* w, const double* gy, double* gx,
                         std::size_t rows, std::size_t cols);
    /// gw[i*cols + j] += gy[i] * x[j]
    void (*outer_acc)(const double* gy, const double* x, double* gw,
                      std::size_t rows, std::size_t cols);
    /// y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    /// sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
};

enum class Isa { scalar, avx2 };

/// The implementation set for an explicit ISA. Requesting avx2 on a CPU
/// without it throws std::runtime_error.
const Ops& ops(Isa which);

/// The active (runtime-selected) implementation set.
const Ops& ops();

Isa active_isa();
std::string_view isa_name(Isa);
bool cpu_supports_avx2();

/// Override the runtime selection (tests, --kernels flag). Throws if the
/// requested ISA is unavailable.
void force_isa(Isa);

}  // namespace drlsim::kernels
