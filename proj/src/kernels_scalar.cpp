#include "drlsim/kernels.hpp"

namespace drlsim::kernels {

// Reference kernels. Plain left-to-right accumulation order; the unit tests
// treat these as the ground truth for the SIMD variants.

namespace {

void matvec_scalar(const float* w, const double* x, const double* bias, double* y,
                   std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const float* row = w + i * cols;
        double acc = bias ? bias[i] : 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += static_cast<double>(row[j]) * x[j];
        y[i] = acc;
    }
}

void matvec_t_acc_scalar(const float* w, const double* gy, double* gx,
                         std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const float* row = w + i * cols;
        const double g = gy[i];
        for (std::size_t j = 0; j < cols; ++j) gx[j] += g * static_cast<double>(row[j]);
    }
}

void outer_acc_scalar(const double* gy, const double* x, double* gw,
                      std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        double* row = gw + i * cols;
        const double g = gy[i];
        for (std::size_t j = 0; j < cols; ++j) row[j] += g * x[j];
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{matvec_scalar, matvec_t_acc_scalar, outer_acc_scalar,
                         axpy_scalar, dot_scalar};
    return ops;
}

}  // namespace drlsim::kernels
