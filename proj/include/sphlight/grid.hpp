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
#include <memory>
#include <vector>

#include "sphlight/kernels.hpp"
#include "sphlight/sh.hpp"

namespace sphlight {

/// Precomputed pixel directions, SH basis planes and weights of one
/// equirectangular grid. Immutable once built; shared between threads.
class SphereGrid {
public:
    SphereGrid(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    /// Basis planes restricted to row v.
    kernels::ConstBasisPlanes basis_row(int v) const;
    const double* basis_plane(int k) const { return basis_[k].data(); }

    const WeightMap& solid_angle() const noexcept { return solid_angle_; }
    const WeightMap& attention() const noexcept { return attention_; }

private:
    int width_;
    int height_;
    std::array<std::vector<double>, kShCount> basis_;
    WeightMap solid_angle_;
    WeightMap attention_;
};

/// Cached grid for (width, height); built on first use.
std::shared_ptr<const SphereGrid> sphere_grid(int width, int height);

}  // namespace sphlight
