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

#include "sphlight/relight.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sphlight/parallel.hpp"

#include "kernels_common.hpp"

namespace sphlight {

namespace {

std::string size_string(int w, int h) {
    return std::to_string(w) + "x" + std::to_string(h);
}

// Coefficients pre-multiplied by the band gains, so irradiance is a plain
// basis combination.
ShCoefficients::Channel irradiance_weights(const ShCoefficients& coeffs, int c) {
    const auto& rc = RenderConstants::standard();
    auto ch = coeffs.channel(c);
    for (int k = 0; k < kShCount; ++k) ch[k] *= rc.a_hat[kShBand[k]];
    return ch;
}

}  // namespace

const RenderConstants& RenderConstants::standard() {
    static const RenderConstants rc = [] {
        using namespace kernels::detail;
        constexpr double pi = std::numbers::pi;
        RenderConstants out{};
        out.a_hat = {pi, 2.0 * pi / 3.0, pi / 4.0};
        out.c1 = out.a_hat[2] * kY22;
        out.c2 = out.a_hat[1] * kY1 / 2.0;
        out.c3 = 3.0 * out.a_hat[2] * kY20;
        out.c4 = out.a_hat[0] * kY00;
        out.c5 = out.a_hat[2] * kY20;
        return out;
    }();
    return rc;
}

IrradianceMatrixSet build_irradiance_matrices(const ShCoefficients& coeffs) {
    const auto& k = RenderConstants::standard();
    IrradianceMatrixSet set{};
    for (int c = 0; c < kShChannels; ++c) {
        const auto L = coeffs.channel(c);
        // Index: 0 L00, 1 L1-1, 2 L10, 3 L11, 4 L2-2, 5 L2-1, 6 L20, 7 L21, 8 L22.
        set.matrices[c] = Matrix4{{
            {k.c1 * L[8], k.c1 * L[4], k.c1 * L[7], k.c2 * L[3]},
            {k.c1 * L[4], -k.c1 * L[8], k.c1 * L[5], k.c2 * L[1]},
            {k.c1 * L[7], k.c1 * L[5], k.c3 * L[6], k.c2 * L[2]},
            {k.c2 * L[3], k.c2 * L[1], k.c2 * L[2], k.c4 * L[0] - k.c5 * L[6]},
        }};
    }
    return set;
}

std::array<double, kShChannels> irradiance_at(const Vec3& normal, const ShCoefficients& coeffs) {
    if (std::abs(normal.norm() - 1.0) > 1e-3)
        throw std::invalid_argument("irradiance_at expects a unit normal");
    const auto set = build_irradiance_matrices(coeffs);
    const std::array<double, 4> eta = {normal.x, normal.y, normal.z, 1.0};
    std::array<double, kShChannels> e{};
    for (int c = 0; c < kShChannels; ++c) {
        double acc = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) acc += eta[i] * set.matrices[c][i][j] * eta[j];
        e[c] = acc;
    }
    return e;
}

ShBasis irradiance_basis(const Vec3& normal) {
    if (std::abs(normal.norm() - 1.0) > 1e-3)
        throw std::invalid_argument("irradiance_basis expects a unit normal");
    const auto& rc = RenderConstants::standard();
    ShBasis b = eval_basis(normal);
    for (int k = 0; k < kShCount; ++k) b[k] *= rc.a_hat[kShBand[k]];
    return b;
}

NormalBasis::NormalBasis(const NormalMap& normals)
    : width_(normals.width()), height_(normals.height()) {
    const std::size_t n = normals.pixel_count();
    for (auto& p : planes_) p.assign(n, 0.0);
    kernels::BasisPlanes out;
    for (int k = 0; k < kShCount; ++k) out[k] = planes_[k].data();
    kernels::active().eval_basis(normals.xs().data(), normals.ys().data(), normals.zs().data(), n,
                                 out);
    const auto valid = normals.validity();
    for (std::size_t i = 0; i < n; ++i)
        if (!valid[i])
            for (auto& p : planes_) p[i] = 0.0;
}

kernels::ConstBasisPlanes NormalBasis::row(int v) const {
    kernels::ConstBasisPlanes r;
    for (int k = 0; k < kShCount; ++k)
        r[k] = planes_[k].data() + static_cast<std::size_t>(v) * width_;
    return r;
}

EquirectImage irradiance_map(const NormalBasis& basis, const ShCoefficients& coeffs) {
    const int w = basis.width(), h = basis.height();
    EquirectImage e(w, h);
    std::array<ShCoefficients::Channel, kShChannels> weights;
    for (int c = 0; c < kShChannels; ++c) weights[c] = irradiance_weights(coeffs, c);
    const auto& k = kernels::active();
    parallel_for(h, [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
            const auto row = basis.row(static_cast<int>(v));
            for (int c = 0; c < kShChannels; ++c)
                k.combine(row, weights[c].data(), w, e.channel(c).data() + v * w);
        }
    });
    return e;
}

EquirectImage relight(const EquirectImage& image, const NormalMap& normals,
                      const ShCoefficients& coeffs) {
    if (!normals.same_size(image))
        throw std::invalid_argument("image is " + size_string(image.width(), image.height()) +
                                    " but normals are " +
                                    size_string(normals.width(), normals.height()));
    return relight(image, NormalBasis(normals), coeffs);
}

EquirectImage relight(const EquirectImage& image, const NormalBasis& basis,
                      const ShCoefficients& coeffs) {
    if (basis.width() != image.width() || basis.height() != image.height())
        throw std::invalid_argument("image is " + size_string(image.width(), image.height()) +
                                    " but normals are " +
                                    size_string(basis.width(), basis.height()));
    EquirectImage out = irradiance_map(basis, coeffs);
    auto dst = out.values();
    const auto src = image.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], 0.0) * src[i];
    return out;
}

EquirectImage blend_lights(const EquirectImage& a, const EquirectImage& b, double lambda_blend) {
    if (!(lambda_blend >= 0.0 && lambda_blend <= 1.0))
        throw std::invalid_argument("blend ratio must lie in [0, 1]");
    if (!a.same_size(b))
        throw std::invalid_argument("cannot blend " + size_string(a.width(), a.height()) +
                                    " with " + size_string(b.width(), b.height()));
    if (lambda_blend == 1.0) return a;
    if (lambda_blend == 0.0) return b;
    EquirectImage out(a.width(), a.height());
    auto dst = out.values();
    const auto va = a.values(), vb = b.values();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = lambda_blend * va[i] + (1.0 - lambda_blend) * vb[i];
    return out;
}

std::array<double, 3> dering_window(int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("dering cutoff must be at least 1");
    std::array<double, 3> h{};
    for (int l = 0; l < 3; ++l)
        h[l] = l < cutoff ? std::cos(std::numbers::pi * l / (2.0 * cutoff)) : 0.0;
    return h;
}

ShCoefficients dering(const ShCoefficients& coeffs, int cutoff) {
    const auto h = dering_window(cutoff);
    ShCoefficients out = coeffs;
    for (int c = 0; c < kShChannels; ++c)
        for (int k = 0; k < kShCount; ++k) out.set(c, k, coeffs(c, k) * h[kShBand[k]]);
    return out;
}

RelitSample generate_relit_sample(const EquirectImage& ldr, const NormalMap& normals,
                                  const EquirectImage& probe_a, const EquirectImage& probe_b,
                                  double lambda_blend, const SampleSettings& settings) {
    const auto blended = blend_lights(probe_a, probe_b, lambda_blend);
    const auto lighting = dering(project(blended, settings.measure), settings.dering_cutoff);
    EquirectImage relit = relight(ldr, normals, lighting * settings.ldr_scale);
    for (double& v : relit.values()) v = std::clamp(v, 0.0, 1.0);
    return {std::move(relit), lighting};
}

}  // namespace sphlight
