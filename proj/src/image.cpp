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

#include "sphlight/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sphlight {

EquirectImage::EquirectImage(int width, int height)
    : width_(width), height_(height), plane_size_(0) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("image dimensions must be at least 1x1, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    plane_size_ = static_cast<std::size_t>(width) * height;
    data_.assign(kChannels * plane_size_, 0.0);
}

EquirectImage EquirectImage::constant(int width, int height, double value) {
    EquirectImage img(width, height);
    std::fill(img.data_.begin(), img.data_.end(), value);
    return img;
}

bool EquirectImage::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void EquirectImage::require_finite(const char* what) const {
    if (!all_finite()) throw std::invalid_argument(std::string(what) + " has non-finite values");
}

NormalMap::NormalMap(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("normal map dimensions must be at least 1x1, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    const std::size_t n = static_cast<std::size_t>(width) * height;
    x_.assign(n, 0.0);
    y_.assign(n, 0.0);
    z_.assign(n, 0.0);
    valid_.assign(n, 0);
}

NormalMap NormalMap::sphere(int width, int height) {
    NormalMap map(width, height);
    for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u)
            map.set(u, v, pixel_to_direction(u, v, width, height).unit_vector());
    return map;
}

NormalMap NormalMap::uniform(int width, int height, const Vec3& n) {
    NormalMap map(width, height);
    for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u) map.set(u, v, n);
    return map;
}

void NormalMap::set(int u, int v, const Vec3& n) {
    const std::size_t i = index(u, v);
    const double len = n.norm();
    if (!std::isfinite(len) || len < 1e-12) {
        x_[i] = y_[i] = z_[i] = 0.0;
        valid_[i] = 0;
        return;
    }
    // Lengths within single-precision rounding of one are stored as given, so
    // float sources survive a save/load cycle bit for bit.
    const double scale = std::abs(len - 1.0) <= 4e-7 ? 1.0 : 1.0 / len;
    x_[i] = n.x * scale;
    y_[i] = n.y * scale;
    z_[i] = n.z * scale;
    valid_[i] = 1;
}

double gamma_decode(std::uint8_t byte) {
    return std::pow(byte / 255.0, 2.2);
}

std::uint8_t gamma_encode(double linear) {
    const double clamped = std::clamp(std::isnan(linear) ? 0.0 : linear, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * std::pow(clamped, 1.0 / 2.2)));
}

namespace {

struct Tap {
    int i0;
    int i1;
    double frac;
};

std::vector<Tap> make_taps(int src, int dst, bool wrap) {
    std::vector<Tap> taps(dst);
    const double ratio = static_cast<double>(src) / dst;
    for (int x = 0; x < dst; ++x) {
        const double pos = (x + 0.5) * ratio - 0.5;
        const double base = std::floor(pos);
        int i0 = static_cast<int>(base);
        int i1 = i0 + 1;
        if (wrap) {
            i0 = ((i0 % src) + src) % src;
            i1 = ((i1 % src) + src) % src;
        } else {
            i0 = std::clamp(i0, 0, src - 1);
            i1 = std::clamp(i1, 0, src - 1);
        }
        taps[x] = {i0, i1, pos - base};
    }
    return taps;
}

// Resamples `planes` planar W x H arrays in place of a generic sampler.
std::vector<std::vector<double>> resample_planes(
    const std::vector<std::span<const double>>& planes, int src_w, int src_h, int dst_w,
    int dst_h) {
    const auto tx = make_taps(src_w, dst_w, true);
    const auto ty = make_taps(src_h, dst_h, false);
    std::vector<std::vector<double>> out;
    out.reserve(planes.size());
    std::vector<double> rows(static_cast<std::size_t>(src_h) * dst_w);
    for (const auto& plane : planes) {
        for (int v = 0; v < src_h; ++v) {
            const double* src_row = plane.data() + static_cast<std::size_t>(v) * src_w;
            double* dst_row = rows.data() + static_cast<std::size_t>(v) * dst_w;
            for (int x = 0; x < dst_w; ++x) {
                const Tap& t = tx[x];
                dst_row[x] = (1.0 - t.frac) * src_row[t.i0] + t.frac * src_row[t.i1];
            }
        }
        std::vector<double> result(static_cast<std::size_t>(dst_w) * dst_h);
        for (int y = 0; y < dst_h; ++y) {
            const Tap& t = ty[y];
            const double* r0 = rows.data() + static_cast<std::size_t>(t.i0) * dst_w;
            const double* r1 = rows.data() + static_cast<std::size_t>(t.i1) * dst_w;
            double* dst = result.data() + static_cast<std::size_t>(y) * dst_w;
            for (int x = 0; x < dst_w; ++x) dst[x] = (1.0 - t.frac) * r0[x] + t.frac * r1[x];
        }
        out.push_back(std::move(result));
    }
    return out;
}

}  // namespace

EquirectImage resize_bilinear(const EquirectImage& image, int width, int height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("resize target must be at least 1x1");
    if (width == image.width() && height == image.height()) return image;

    std::vector<std::span<const double>> planes;
    for (int c = 0; c < EquirectImage::kChannels; ++c) planes.push_back(image.channel(c));
    auto resampled = resample_planes(planes, image.width(), image.height(), width, height);

    EquirectImage out(width, height);
    for (int c = 0; c < EquirectImage::kChannels; ++c)
        std::copy(resampled[c].begin(), resampled[c].end(), out.channel(c).begin());
    return out;
}

NormalMap resize_bilinear(const NormalMap& normals, int width, int height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("resize target must be at least 1x1");

    std::vector<double> validity(normals.validity().begin(), normals.validity().end());
    const std::vector<std::span<const double>> planes{normals.xs(), normals.ys(), normals.zs(),
                                                      validity};
    auto r = resample_planes(planes, normals.width(), normals.height(), width, height);

    NormalMap out(width, height);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            const std::size_t i = static_cast<std::size_t>(v) * width + u;
            // Any invalid contributor with nonzero weight pulls validity below 1.
            if (r[3][i] < 1.0 - 1e-12) {
                out.set(u, v, {});
                continue;
            }
            out.set(u, v, {r[0][i], r[1][i], r[2][i]});
        }
    }
    return out;
}

}  // namespace sphlight
