// AVX2 kernel variants. This translation unit is compiled with -mavx2 -mfma;
// the dispatcher only hands these out when cpuid reports AVX2+FMA.

#include <immintrin.h>

#include "drlsim/kernels.hpp"

namespace drlsim::kernels {

namespace {

// Horizontal sum of a 4-lane double accumulator.
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// Widen 4 packed floats to 4 doubles.
inline __m256d load4_f32_as_f64(const float* p) {
    return _mm256_cvtps_pd(_mm_loadu_ps(p));
}

void matvec_avx2(const float* w, const double* x, const double* bias, double* y,
                 std::size_t rows, std::size_t cols) {
    const std::size_t vec_end = cols - (cols % 4);
    for (std::size_t i = 0; i < rows; ++i) {
        const float* row = w + i * cols;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < vec_end; j += 4) {
            acc = _mm256_fmadd_pd(load4_f32_as_f64(row + j), _mm256_loadu_pd(x + j), acc);
        }
        double sum = hsum(acc);
        for (std::size_t j = vec_end; j < cols; ++j)
            sum += static_cast<double>(row[j]) * x[j];
        y[i] = sum + (bias ? bias[i] : 0.0);
    }
}

void matvec_t_acc_avx2(const float* w, const double* gy, double* gx,
                       std::size_t rows, std::size_t cols) {
    const std::size_t vec_end = cols - (cols % 4);
    for (std::size_t i = 0; i < rows; ++i) {
        const float* row = w + i * cols;
        const __m256d g = _mm256_set1_pd(gy[i]);
        for (std::size_t j = 0; j < vec_end; j += 4) {
            __m256d acc = _mm256_loadu_pd(gx + j);
            acc = _mm256_fmadd_pd(g, load4_f32_as_f64(row + j), acc);
            _mm256_storeu_pd(gx + j, acc);
        }
        const double gs = gy[i];
        for (std::size_t j = vec_end; j < cols; ++j)
            gx[j] += gs * static_cast<double>(row[j]);
    }
}

void outer_acc_avx2(const double* gy, const double* x, double* gw,
                    std::size_t rows, std::size_t cols) {
    const std::size_t vec_end = cols - (cols % 4);
    for (std::size_t i = 0; i < rows; ++i) {
        double* row = gw + i * cols;
        const __m256d g = _mm256_set1_pd(gy[i]);
        for (std::size_t j = 0; j < vec_end; j += 4) {
            __m256d acc = _mm256_loadu_pd(row + j);
            acc = _mm256_fmadd_pd(g, _mm256_loadu_pd(x + j), acc);
            _mm256_storeu_pd(row + j, acc);
        }
        const double gs = gy[i];
        for (std::size_t j = vec_end; j < cols; ++j) row[j] += gs * x[j];
    }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const std::size_t vec_end = n - (n % 4);
    const __m256d av = _mm256_set1_pd(a);
    for (std::size_t j = 0; j < vec_end; j += 4) {
        __m256d acc = _mm256_loadu_pd(y + j);
        acc = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + j), acc);
        _mm256_storeu_pd(y + j, acc);
    }
    for (std::size_t j = vec_end; j < n; ++j) y[j] += a * x[j];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    const std::size_t vec_end = n - (n % 4);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < vec_end; j += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j), acc);
    }
    double sum = hsum(acc);
    for (std::size_t j = vec_end; j < n; ++j) sum += x[j] * y[j];
    return sum;
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops{matvec_avx2, matvec_t_acc_avx2, outer_acc_avx2,
                         axpy_avx2, dot_avx2};
    return ops;
}

}  // namespace drlsim::kernels
