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

#include <cmath>
#include <numbers>

namespace sphlight {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

/// Direction on the unit sphere, z-up. phi is the azimuth in [0, 2pi),
/// theta the polar angle measured from +z in [0, pi].
struct SphericalDirection {
    double phi = 0.0;
    double theta = 0.0;

    Vec3 unit_vector() const {
        const double s = std::sin(theta);
        return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
    }
};

/// Pixel-center direction of (u, v) on a width x height equirectangular grid.
/// Row 0 sits next to the +z pole. Throws std::out_of_range.
SphericalDirection pixel_to_direction(int u, int v, int width, int height);

/// Polar angle of the center of row v.
inline double row_theta(int v, int height) {
    return std::numbers::pi * (v + 0.5) / height;
}

/// Azimuth of the center of column u.
inline double column_phi(int u, int width) {
    return 2.0 * std::numbers::pi * (u + 0.5) / width;
}

}  // namespace sphlight
