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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sphlight/geometry.hpp"

namespace sphlight {

/// W x H x 3 equirectangular panorama in linear units, stored as three
/// planes (one per color channel), rows top (theta ~ 0) to bottom.
class EquirectImage {
public:
    static constexpr int kChannels = 3;

    /// Zero image. Throws std::invalid_argument for a zero dimension.
    EquirectImage(int width, int height);

    static EquirectImage constant(int width, int height, double value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return plane_size_; }

    double& at(int u, int v, int c) { return data_[index(u, v, c)]; }
    double at(int u, int v, int c) const { return data_[index(u, v, c)]; }

    std::span<double> channel(int c) {
        return {data_.data() + c * plane_size_, plane_size_};
    }
    std::span<const double> channel(int c) const {
        return {data_.data() + c * plane_size_, plane_size_};
    }

    /// All 3 * W * H values, channel-major.
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool same_size(const EquirectImage& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool all_finite() const;

    /// Throws std::invalid_argument naming `what` when a value is NaN or inf.
    void require_finite(const char* what) const;

private:
    std::size_t index(int u, int v, int c) const {
        return c * plane_size_ + static_cast<std::size_t>(v) * width_ + u;
    }

    int width_;
    int height_;
    std::size_t plane_size_;
    std::vector<double> data_;
};

/// Per-pixel world-space unit normals aligned with a panorama. Pixels whose
/// input normal had (near) zero length are stored as (0,0,0) and flagged
/// invalid; everything else is renormalized on assignment.
class NormalMap {
public:
    NormalMap(int width, int height);

    /// Every pixel's normal equals its own viewing direction, so the map
    /// covers the whole sphere of orientations.
    static NormalMap sphere(int width, int height);

    /// Every pixel gets the same normal.
    static NormalMap uniform(int width, int height, const Vec3& n);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return x_.size(); }

    /// Stores n / |n| (n itself when |n| is 1 up to float rounding), or marks
    /// the pixel invalid when |n| < 1e-12 or not finite.
    void set(int u, int v, const Vec3& n);

    Vec3 at(int u, int v) const {
        const std::size_t i = index(u, v);
        return {x_[i], y_[i], z_[i]};
    }
    bool valid(int u, int v) const { return valid_[index(u, v)] != 0; }

    std::span<const double> xs() const { return x_; }
    std::span<const double> ys() const { return y_; }
    std::span<const double> zs() const { return z_; }
    std::span<const std::uint8_t> validity() const { return valid_; }

    bool same_size(const EquirectImage& img) const {
        return width_ == img.width() && height_ == img.height();
    }

private:
    std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width_ + u; }

    int width_;
    int height_;
    std::vector<double> x_, y_, z_;
    std::vector<std::uint8_t> valid_;
};

// Radiance RGBE (.hdr). Reads flat, old-style RLE and new-style RLE
// scanlines with the "-Y h +X w" orientation; writes new-style RLE.
EquirectImage load_hdr(const std::filesystem::path& path);
void save_hdr(const EquirectImage& image, const std::filesystem::path& path);

// Portable float map, 3-channel "PF". Saved little-endian (negative scale),
// bottom row first as the format requires.
NormalMap load_pfm(const std::filesystem::path& path);
void save_pfm(const NormalMap& normals, const std::filesystem::path& path);

// 8-bit RGB PNG with a pure 2.2 power-law transfer.
EquirectImage load_ldr(const std::filesystem::path& path);
void save_ldr(const EquirectImage& image, const std::filesystem::path& path);

/// (byte / 255)^2.2
double gamma_decode(std::uint8_t byte);
/// round(255 * clamp(linear, 0, 1)^(1/2.2))
std::uint8_t gamma_encode(double linear);

/// Separable bilinear resampling with pixel-center alignment. The azimuth
/// axis wraps around the seam, the polar axis clamps at the poles.
EquirectImage resize_bilinear(const EquirectImage& image, int width, int height);

/// Same filter applied to the vector components, followed by renormalization.
/// Output pixels touched by an invalid input normal are invalid.
NormalMap resize_bilinear(const NormalMap& normals, int width, int height);

}  // namespace sphlight
