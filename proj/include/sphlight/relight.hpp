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
#include <vector>

#include "sphlight/image.hpp"
#include "sphlight/kernels.hpp"
#include "sphlight/sh.hpp"

namespace sphlight {

/// Constants of the quadratic-form irradiance. c1..c5 weight the matrix
/// entries, a_hat[l] is the clamped-cosine gain of band l.
struct RenderConstants {
    double c1, c2, c3, c4, c5;
    std::array<double, 3> a_hat;

    static const RenderConstants& standard();
};

using Matrix4 = std::array<std::array<double, 4>, 4>;

struct IrradianceMatrixSet {
    std::array<Matrix4, kShChannels> matrices;
};

IrradianceMatrixSet build_irradiance_matrices(const ShCoefficients& coeffs);

/// Per-channel irradiance eta(n)^T M eta(n) with eta(n) = (nx, ny, nz, 1).
/// Throws std::invalid_argument when |n| is not within 1e-3 of 1.
std::array<double, kShChannels> irradiance_at(const Vec3& normal, const ShCoefficients& coeffs);

/// B_k(n) = a_hat[l(k)] * Y_k(n); irradiance of channel c is dot(B, L_c).
ShBasis irradiance_basis(const Vec3& normal);

/// SH basis evaluated at every normal of a map. Invalid normals get an
/// all-zero basis so they render black and carry no gradient.
class NormalBasis {
public:
    explicit NormalBasis(const NormalMap& normals);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    kernels::ConstBasisPlanes row(int v) const;

private:
    int width_;
    int height_;
    std::array<std::vector<double>, kShCount> planes_;
};

/// Unclamped irradiance per pixel and channel.
EquirectImage irradiance_map(const NormalBasis& basis, const ShCoefficients& coeffs);

/// out = max(E(n), 0) * image, per channel. Throws std::invalid_argument on a
/// size mismatch between image and normals.
EquirectImage relight(const EquirectImage& image, const NormalMap& normals,
                      const ShCoefficients& coeffs);
EquirectImage relight(const EquirectImage& image, const NormalBasis& basis,
                      const ShCoefficients& coeffs);

/// lambda * a + (1 - lambda) * b.
EquirectImage blend_lights(const EquirectImage& a, const EquirectImage& b, double lambda_blend);

/// Cosine window h(l) = cos(pi l / (2 cutoff)) for l < cutoff, else 0.
std::array<double, 3> dering_window(int cutoff);

ShCoefficients dering(const ShCoefficients& coeffs, int cutoff = 3);

struct SampleSettings {
    /// Multiplier applied to the lighting before relighting the LDR input.
    double ldr_scale = 100.0;
    int dering_cutoff = 3;
    ProjectionMeasure measure = ProjectionMeasure::solid_angle;
};

struct RelitSample {
    EquirectImage relit_ldr;
    /// Unscaled (HDR) lighting, i.e. without ldr_scale applied.
    ShCoefficients ground_truth;
};

/// Blends two probes, projects and derings the result, then relights the
/// linear LDR image with the scaled lighting and clamps it to [0, 1].
RelitSample generate_relit_sample(const EquirectImage& ldr, const NormalMap& normals,
                                  const EquirectImage& probe_a, const EquirectImage& probe_b,
                                  double lambda_blend, const SampleSettings& settings = {});

}  // namespace sphlight
