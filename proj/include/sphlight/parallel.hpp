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

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sphlight {

/// Worker cap from SPHLIGHT_THREADS (0 or unset means hardware concurrency).
int worker_count();

/// Splits [0, count) into contiguous chunks and runs body(begin, end) on up to
/// worker_count() threads. Returns after every chunk finished; the first
/// exception thrown by a chunk is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (tree) summation. The tree shape depends only on the input length,
/// so partial sums produced per row reduce to identical bits for any thread count.
double pairwise_sum(std::span<const double> values);

template <std::size_t N>
std::array<double, N> pairwise_sum(std::span<const std::array<double, N>> parts) {
    if (parts.empty()) return {};
    if (parts.size() == 1) return parts[0];
    const std::size_t half = parts.size() / 2;
    auto left = pairwise_sum<N>(parts.first(half));
    const auto right = pairwise_sum<N>(parts.subspan(half));
    for (std::size_t i = 0; i < N; ++i) left[i] += right[i];
    return left;
}

/// Computes one N-vector per row with row_fn(row) and reduces them pairwise.
template <std::size_t N>
std::array<double, N> reduce_rows(std::size_t rows,
                                  const std::function<std::array<double, N>(std::size_t)>& row_fn) {
    std::vector<std::array<double, N>> partial(rows);
    parallel_for(rows, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) partial[r] = row_fn(r);
    });
    return pairwise_sum<N>(std::span<const std::array<double, N>>(partial));
}

}  // namespace sphlight
