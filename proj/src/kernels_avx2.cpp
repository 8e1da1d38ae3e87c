/*
 * Copyright (C) 2026 The sphlight Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Built with -mavx2 -mfma. Nothing in here may run before the dispatcher has
// confirmed CPU support.

#include "sphlight/kernels.hpp"

#include <immintrin.h>

#include "kernels_common.hpp"

namespace sphlight::kernels {
namespace {

using namespace detail;

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void eval_basis_avx2(const double* x, const double* y, const double* z, std::size_t n,
                     const BasisPlanes& out) {
    const __m256d y00 = _mm256_set1_pd(kY00);
    const __m256d y1 = _mm256_set1_pd(kY1);
    const __m256d y2 = _mm256_set1_pd(kY2);
    const __m256d y20 = _mm256_set1_pd(kY20);
    const __m256d y22 = _mm256_set1_pd(kY22);
    const __m256d three = _mm256_set1_pd(3.0);
    const __m256d one = _mm256_set1_pd(1.0);

    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        const __m256d zv = _mm256_loadu_pd(z + i);
        _mm256_storeu_pd(out[0] + i, y00);
        _mm256_storeu_pd(out[1] + i, _mm256_mul_pd(y1, yv));
        _mm256_storeu_pd(out[2] + i, _mm256_mul_pd(y1, zv));
        _mm256_storeu_pd(out[3] + i, _mm256_mul_pd(y1, xv));
        _mm256_storeu_pd(out[4] + i, _mm256_mul_pd(_mm256_mul_pd(y2, xv), yv));
        _mm256_storeu_pd(out[5] + i, _mm256_mul_pd(_mm256_mul_pd(y2, yv), zv));
        const __m256d zz3 = _mm256_mul_pd(_mm256_mul_pd(three, zv), zv);
        _mm256_storeu_pd(out[6] + i, _mm256_mul_pd(y20, _mm256_sub_pd(zz3, one)));
        _mm256_storeu_pd(out[7] + i, _mm256_mul_pd(_mm256_mul_pd(y2, xv), zv));
        const __m256d d = _mm256_sub_pd(_mm256_mul_pd(xv, xv), _mm256_mul_pd(yv, yv));
        _mm256_storeu_pd(out[8] + i, _mm256_mul_pd(y22, d));
    }
    for (; i < n; ++i) {
        const double xi = x[i], yi = y[i], zi = z[i];
        out[0][i] = kY00;
        out[1][i] = kY1 * yi;
        out[2][i] = kY1 * zi;
        out[3][i] = kY1 * xi;
        out[4][i] = kY2 * xi * yi;
        out[5][i] = kY2 * yi * zi;
        out[6][i] = kY20 * (3.0 * zi * zi - 1.0);
        out[7][i] = kY2 * xi * zi;
        out[8][i] = kY22 * (xi * xi - yi * yi);
    }
}

void combine_avx2(const ConstBasisPlanes& basis, const double* coeffs, std::size_t n,
                  double* out) {
    __m256d c[kBasisCount];
    for (std::size_t k = 0; k < kBasisCount; ++k) c[k] = _mm256_set1_pd(coeffs[k]);

    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d acc = _mm256_mul_pd(c[0], _mm256_loadu_pd(basis[0] + i));
        for (std::size_t k = 1; k < kBasisCount; ++k)
            acc = _mm256_fmadd_pd(c[k], _mm256_loadu_pd(basis[k] + i), acc);
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kBasisCount; ++k) acc += coeffs[k] * basis[k][i];
        out[i] = acc;
    }
}

void weighted_dot_avx2(const ConstBasisPlanes& basis, const double* f, const double* w,
                       std::size_t n, double* out) {
    __m256d acc[kBasisCount];
    for (auto& a : acc) a = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d fw = _mm256_loadu_pd(f + i);
        if (w) fw = _mm256_mul_pd(fw, _mm256_loadu_pd(w + i));
        for (std::size_t k = 0; k < kBasisCount; ++k)
            acc[k] = _mm256_fmadd_pd(fw, _mm256_loadu_pd(basis[k] + i), acc[k]);
    }
    double tail[kBasisCount] = {};
    for (; i < n; ++i) {
        const double fw = w ? f[i] * w[i] : f[i];
        for (std::size_t k = 0; k < kBasisCount; ++k) tail[k] += fw * basis[k][i];
    }
    for (std::size_t k = 0; k < kBasisCount; ++k) out[k] = hsum(acc[k]) + tail[k];
}

void gram_avx2(const ConstBasisPlanes& basis, const double* w, std::size_t n, double* out) {
    __m256d acc[kGramCount];
    for (auto& a : acc) a = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d b[kBasisCount];
        for (std::size_t k = 0; k < kBasisCount; ++k) b[k] = _mm256_loadu_pd(basis[k] + i);
        const __m256d wv = w ? _mm256_loadu_pd(w + i) : _mm256_set1_pd(1.0);
        std::size_t idx = 0;
        for (std::size_t j = 0; j < kBasisCount; ++j) {
            const __m256d bj = _mm256_mul_pd(wv, b[j]);
            for (std::size_t k = j; k < kBasisCount; ++k, ++idx)
                acc[idx] = _mm256_fmadd_pd(bj, b[k], acc[idx]);
        }
    }
    double tail[kGramCount] = {};
    for (; i < n; ++i) {
        const double wi = w ? w[i] : 1.0;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < kBasisCount; ++j) {
            const double bj = wi * basis[j][i];
            for (std::size_t k = j; k < kBasisCount; ++k) tail[idx++] += bj * basis[k][i];
        }
    }
    for (std::size_t t = 0; t < kGramCount; ++t) out[t] = hsum(acc[t]) + tail[t];
}

}  // namespace

namespace detail {

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2", eval_basis_avx2, combine_avx2, weighted_dot_avx2,
                                   gram_avx2};
    return table;
}

}  // namespace detail
}  // namespace sphlight::kernels
