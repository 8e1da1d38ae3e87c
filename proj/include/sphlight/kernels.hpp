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

#pragma once

// Data-parallel inner loops shared by projection, reconstruction, rendering
// and the least-squares solver. Every kernel has a scalar reference version
// and, on x86-64, an AVX2/FMA version; active() picks one at runtime.
//
// All arrays are planar (structure of arrays). A basis view holds one plane
// per SH function in the fixed (l,m) layout.

#include <array>
#include <cstddef>
#include <string_view>

namespace sphlight::kernels {

inline constexpr std::size_t kBasisCount = 9;
inline constexpr std::size_t kGramCount = kBasisCount * (kBasisCount + 1) / 2;

using BasisPlanes = std::array<double*, kBasisCount>;
using ConstBasisPlanes = std::array<const double*, kBasisCount>;

struct KernelTable {
    std::string_view name;

    /// out[k][i] = Y_k(x[i], y[i], z[i]); directions are assumed unit length.
    void (*eval_basis)(const double* x, const double* y, const double* z, std::size_t n,
                       const BasisPlanes& out);

    /// out[i] = sum_k coeffs[k] * basis[k][i].
    void (*combine)(const ConstBasisPlanes& basis, const double* coeffs, std::size_t n,
                    double* out);

    /// out[k] = sum_i f[i] * w[i] * basis[k][i]; w may be null (all ones).
    void (*weighted_dot)(const ConstBasisPlanes& basis, const double* f, const double* w,
                         std::size_t n, double* out);

    /// Packed upper triangle of sum_i w[i] * b_i b_i^T, row-major over (j <= k).
    void (*gram)(const ConstBasisPlanes& basis, const double* w, std::size_t n, double* out);
};

const KernelTable& scalar();

/// Null when the build has no AVX2 unit or the CPU lacks AVX2+FMA.
const KernelTable* avx2();

/// Best table for this CPU. SPHLIGHT_SIMD=scalar forces the reference path.
const KernelTable& active();

/// Index of (j, k), j <= k, in the packed gram output.
constexpr std::size_t gram_index(std::size_t j, std::size_t k) {
    return j * kBasisCount - j * (j + 1) / 2 + k;
}

}  // namespace sphlight::kernels
