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

#include "sphlight/grid.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace sphlight {

SphereGrid::SphereGrid(int width, int height)
    : width_(width),
      height_(height),
      solid_angle_(solid_angle_weights(width, height)),
      attention_(attention_mask(width, height)) {
    const std::size_t n = pixel_count();
    for (auto& plane : basis_) plane.resize(n);

    std::vector<double> x(width), y(width), z(width);
    const auto& k = kernels::active();
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            const Vec3 d = pixel_to_direction(u, v, width, height).unit_vector();
            x[u] = d.x;
            y[u] = d.y;
            z[u] = d.z;
        }
        kernels::BasisPlanes out;
        for (int b = 0; b < kShCount; ++b)
            out[b] = basis_[b].data() + static_cast<std::size_t>(v) * width;
        k.eval_basis(x.data(), y.data(), z.data(), width, out);
    }
}

kernels::ConstBasisPlanes SphereGrid::basis_row(int v) const {
    kernels::ConstBasisPlanes row;
    for (int b = 0; b < kShCount; ++b)
        row[b] = basis_[b].data() + static_cast<std::size_t>(v) * width_;
    return row;
}

std::shared_ptr<const SphereGrid> sphere_grid(int width, int height) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const SphereGrid>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{width, height}];
    if (!slot) slot = std::make_shared<const SphereGrid>(width, height);
    return slot;
}

}  // namespace sphlight
