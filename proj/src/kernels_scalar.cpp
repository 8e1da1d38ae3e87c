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

#include "sphlight/kernels.hpp"

#include "kernels_common.hpp"

namespace sphlight::kernels {
namespace {

using namespace detail;

void eval_basis_scalar(const double* x, const double* y, const double* z, std::size_t n,
                       const BasisPlanes& out) {
    for (std::size_t i = 0; i < n; ++i) {
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

void combine_scalar(const ConstBasisPlanes& basis, const double* coeffs, std::size_t n,
                    double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kBasisCount; ++k) acc += coeffs[k] * basis[k][i];
        out[i] = acc;
    }
}

void weighted_dot_scalar(const ConstBasisPlanes& basis, const double* f, const double* w,
                         std::size_t n, double* out) {
    double acc[kBasisCount] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const double fw = w ? f[i] * w[i] : f[i];
        for (std::size_t k = 0; k < kBasisCount; ++k) acc[k] += fw * basis[k][i];
    }
    for (std::size_t k = 0; k < kBasisCount; ++k) out[k] = acc[k];
}

void gram_scalar(const ConstBasisPlanes& basis, const double* w, std::size_t n, double* out) {
    double acc[kGramCount] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w ? w[i] : 1.0;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < kBasisCount; ++j) {
            const double bj = wi * basis[j][i];
            for (std::size_t k = j; k < kBasisCount; ++k) acc[idx++] += bj * basis[k][i];
        }
    }
    for (std::size_t t = 0; t < kGramCount; ++t) out[t] = acc[t];
}

}  // namespace

const KernelTable& scalar() {
    static const KernelTable table{"scalar", eval_basis_scalar, combine_scalar,
                                   weighted_dot_scalar, gram_scalar};
    return table;
}

}  // namespace sphlight::kernels
