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

#include "sphlight/sh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sphlight/grid.hpp"
#include "sphlight/kernels.hpp"
#include "sphlight/parallel.hpp"

namespace sphlight {

ShBasis eval_basis(const Vec3& dir) {
    ShBasis out;
    kernels::BasisPlanes planes;
    for (int k = 0; k < kShCount; ++k) planes[k] = &out[k];
    kernels::scalar().eval_basis(&dir.x, &dir.y, &dir.z, 1, planes);
    return out;
}

ShBasis eval_basis(const SphericalDirection& dir) {
    return eval_basis(dir.unit_vector());
}

ShCoefficients::ShCoefficients(const std::array<double, kShTotal>& flat) : values_(flat) {
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("SH coefficients must be finite");
}

ShCoefficients::ShCoefficients(const Channel& r, const Channel& g, const Channel& b) {
    std::array<double, kShTotal> flat;
    std::copy(r.begin(), r.end(), flat.begin());
    std::copy(g.begin(), g.end(), flat.begin() + kShCount);
    std::copy(b.begin(), b.end(), flat.begin() + 2 * kShCount);
    *this = ShCoefficients(flat);
}

void ShCoefficients::set(int channel, int k, double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("SH coefficients must be finite");
    values_[channel * kShCount + k] = value;
}

ShCoefficients::Channel ShCoefficients::channel(int c) const {
    Channel out;
    std::copy_n(values_.begin() + c * kShCount, kShCount, out.begin());
    return out;
}

double ShCoefficients::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

ShCoefficients& ShCoefficients::operator+=(const ShCoefficients& o) {
    for (int i = 0; i < kShTotal; ++i) values_[i] += o.values_[i];
    return *this;
}

ShCoefficients& ShCoefficients::operator-=(const ShCoefficients& o) {
    for (int i = 0; i < kShTotal; ++i) values_[i] -= o.values_[i];
    return *this;
}

ShCoefficients& ShCoefficients::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

namespace {

WeightMap row_weights(int width, int height, WeightMap::Kind kind,
                      const std::vector<double>& per_row) {
    WeightMap map{width, height, kind, {}};
    map.weights.resize(static_cast<std::size_t>(width) * height);
    for (int v = 0; v < height; ++v)
        std::fill_n(map.weights.begin() + static_cast<std::ptrdiff_t>(v) * width, width,
                    per_row[v]);
    return map;
}

void check_dims(int width, int height) {
    if (width < 1 || height < 1) throw std::invalid_argument("grid dimensions must be positive");
}

}  // namespace

WeightMap solid_angle_weights(int width, int height) {
    check_dims(width, height);
    const double cell = (2.0 * std::numbers::pi / width) * (std::numbers::pi / height);
    std::vector<double> rows(height);
    for (int v = 0; v < height; ++v) rows[v] = std::sin(row_theta(v, height)) * cell;
    return row_weights(width, height, WeightMap::Kind::solid_angle, rows);
}

WeightMap attention_mask(int width, int height) {
    check_dims(width, height);
    std::vector<double> rows(height);
    for (int v = 0; v < height; ++v) rows[v] = std::sin(row_theta(v, height));
    // Sum over all pixels = width * sum over rows.
    const double total = width * pairwise_sum(rows);
    const double scale = static_cast<double>(width) * height / total;
    for (double& r : rows) r *= scale;
    return row_weights(width, height, WeightMap::Kind::attention, rows);
}

WeightMap uniform_sphere_weights(int width, int height) {
    check_dims(width, height);
    const double w = 4.0 * std::numbers::pi / (static_cast<double>(width) * height);
    return row_weights(width, height, WeightMap::Kind::uniform, std::vector<double>(height, w));
}

ShCoefficients project(const EquirectImage& image, ProjectionMeasure measure) {
    image.require_finite("projected image");
    const int w = image.width(), h = image.height();
    const auto grid = sphere_grid(w, h);
    const WeightMap uniform =
        measure == ProjectionMeasure::uniform ? uniform_sphere_weights(w, h) : WeightMap{};
    const WeightMap& weights = measure == ProjectionMeasure::uniform ? uniform : grid->solid_angle();
    const auto& k = kernels::active();

    const auto sums = reduce_rows<kShTotal>(h, [&](std::size_t v) {
        std::array<double, kShTotal> row{};
        const auto basis = grid->basis_row(static_cast<int>(v));
        const double* wrow = weights.weights.data() + v * w;
        for (int c = 0; c < kShChannels; ++c)
            k.weighted_dot(basis, image.channel(c).data() + v * w, wrow, w,
                           row.data() + c * kShCount);
        return row;
    });
    return ShCoefficients(sums);
}

EquirectImage reconstruct(const ShCoefficients& coeffs, int width, int height) {
    check_dims(width, height);
    const auto grid = sphere_grid(width, height);
    EquirectImage out(width, height);
    const auto& k = kernels::active();
    parallel_for(height, [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
            const auto basis = grid->basis_row(static_cast<int>(v));
            for (int c = 0; c < kShChannels; ++c) {
                const auto ch = coeffs.channel(c);
                k.combine(basis, ch.data(), width, out.channel(c).data() + v * width);
            }
        }
    });
    return out;
}

}  // namespace sphlight
