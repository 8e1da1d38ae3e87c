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
#include <span>
#include <string_view>
#include <vector>

#include "sphlight/geometry.hpp"
#include "sphlight/image.hpp"

namespace sphlight {

/// Number of real SH functions in bands 0..2.
inline constexpr int kShCount = 9;
inline constexpr int kShChannels = 3;
inline constexpr int kShTotal = kShCount * kShChannels;

/// Band l of each flat basis index, layout
/// (0,0) (1,-1) (1,0) (1,1) (2,-2) (2,-1) (2,0) (2,1) (2,2).
inline constexpr std::array<int, kShCount> kShBand = {0, 1, 1, 1, 2, 2, 2, 2, 2};
inline constexpr std::array<int, kShCount> kShOrder = {0, -1, 0, 1, -2, -1, 0, 1, 2};
inline constexpr std::array<std::string_view, kShCount> kShLayout = {
    "0,0", "1,-1", "1,0", "1,1", "2,-2", "2,-1", "2,0", "2,1", "2,2"};

using ShBasis = std::array<double, kShCount>;

/// Real SH basis (bands 0..2) at a unit direction.
ShBasis eval_basis(const Vec3& dir);
ShBasis eval_basis(const SphericalDirection& dir);

/// 3 x 9 lighting coefficients in linear radiance; channel 0/1/2 = r/g/b.
class ShCoefficients {
public:
    using Channel = std::array<double, kShCount>;

    ShCoefficients() = default;

    /// Throws std::invalid_argument when a value is NaN or infinite.
    explicit ShCoefficients(const std::array<double, kShTotal>& flat);
    ShCoefficients(const Channel& r, const Channel& g, const Channel& b);

    /// Same channel vector for r, g and b.
    static ShCoefficients gray(const Channel& c) { return {c, c, c}; }

    double operator()(int channel, int k) const { return values_[channel * kShCount + k]; }

    /// Throws std::invalid_argument on a non-finite value.
    void set(int channel, int k, double value);

    Channel channel(int c) const;
    const std::array<double, kShTotal>& flat() const noexcept { return values_; }

    double max_abs() const;

    ShCoefficients& operator+=(const ShCoefficients& o);
    ShCoefficients& operator-=(const ShCoefficients& o);
    ShCoefficients& operator*=(double s);
    friend ShCoefficients operator+(ShCoefficients a, const ShCoefficients& b) { return a += b; }
    friend ShCoefficients operator-(ShCoefficients a, const ShCoefficients& b) { return a -= b; }
    friend ShCoefficients operator*(ShCoefficients a, double s) { return a *= s; }
    friend ShCoefficients operator*(double s, ShCoefficients a) { return a *= s; }
    friend bool operator==(const ShCoefficients&, const ShCoefficients&) = default;

private:
    std::array<double, kShTotal> values_{};
};

/// Per-pixel spherical weights on a W x H equirectangular grid.
struct WeightMap {
    enum class Kind { solid_angle, attention, uniform };

    int width = 0;
    int height = 0;
    Kind kind = Kind::solid_angle;
    std::vector<double> weights;

    double at(int u, int v) const { return weights[static_cast<std::size_t>(v) * width + u]; }
    /// Weight shared by every pixel of row v (all supported kinds are azimuth-invariant).
    double row(int v) const { return weights[static_cast<std::size_t>(v) * width]; }
};

/// sin(theta) * (2 pi / W) * (pi / H); sums to ~4 pi.
WeightMap solid_angle_weights(int width, int height);

/// sin(theta) rescaled to mean 1.
WeightMap attention_mask(int width, int height);

/// Constant 4 pi / (W H), the measure that treats the panorama as a uniform
/// sphere sampling. Biased toward the poles on equirectangular grids.
WeightMap uniform_sphere_weights(int width, int height);

enum class ProjectionMeasure {
    solid_angle,
    /// Uniform 4 pi / N weighting; see uniform_sphere_weights().
    uniform,
};

/// L_k = sum_pixels image * Y_k * weight, per channel.
/// Throws std::invalid_argument on non-finite pixels.
ShCoefficients project(const EquirectImage& image,
                       ProjectionMeasure measure = ProjectionMeasure::solid_angle);

/// Band-limited map sum_k L_k Y_k sampled at pixel centers.
EquirectImage reconstruct(const ShCoefficients& coeffs, int width, int height);

}  // namespace sphlight
