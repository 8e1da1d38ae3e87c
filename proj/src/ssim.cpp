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

#include "sphlight/ssim.hpp"

#include <algorithm>
#include <stdexcept>

namespace sphlight {

Ssim::Ssim(int width, int height, int radius, double c1, double c2)
    : width_(width), height_(height), radius_(radius), c1_(c1), c2_(c2) {
    if (width < 1 || height < 1 || radius < 0)
        throw std::invalid_argument("invalid SSIM window configuration");
}

namespace {

// Horizontal box with wrap-around. The operator is circulant with a
// symmetric stencil, hence self-adjoint.
void box_wrap(const double* in, double* out, int w, int h, int r) {
    const double norm = 1.0 / (2 * r + 1);
    for (int v = 0; v < h; ++v) {
        const double* row = in + static_cast<std::size_t>(v) * w;
        double* dst = out + static_cast<std::size_t>(v) * w;
        for (int u = 0; u < w; ++u) {
            double acc = 0.0;
            for (int d = -r; d <= r; ++d) acc += row[((u + d) % w + w) % w];
            dst[u] = acc * norm;
        }
    }
}

void box_clamp(const double* in, double* out, int w, int h, int r) {
    const double norm = 1.0 / (2 * r + 1);
    for (int v = 0; v < h; ++v) {
        double* dst = out + static_cast<std::size_t>(v) * w;
        std::fill_n(dst, w, 0.0);
        for (int d = -r; d <= r; ++d) {
            const double* src = in + static_cast<std::size_t>(std::clamp(v + d, 0, h - 1)) * w;
            for (int u = 0; u < w; ++u) dst[u] += src[u];
        }
        for (int u = 0; u < w; ++u) dst[u] *= norm;
    }
}

void box_clamp_adjoint(const double* in, double* out, int w, int h, int r) {
    const double norm = 1.0 / (2 * r + 1);
    std::fill_n(out, static_cast<std::size_t>(w) * h, 0.0);
    for (int v = 0; v < h; ++v) {
        const double* src = in + static_cast<std::size_t>(v) * w;
        for (int d = -r; d <= r; ++d) {
            double* dst = out + static_cast<std::size_t>(std::clamp(v + d, 0, h - 1)) * w;
            for (int u = 0; u < w; ++u) dst[u] += src[u] * norm;
        }
    }
}

}  // namespace

void Ssim::filter(std::span<const double> in, std::span<double> out) const {
    std::vector<double> tmp(in.size());
    box_wrap(in.data(), tmp.data(), width_, height_, radius_);
    box_clamp(tmp.data(), out.data(), width_, height_, radius_);
}

void Ssim::filter_adjoint(std::span<const double> in, std::span<double> out) const {
    std::vector<double> tmp(in.size());
    box_clamp_adjoint(in.data(), tmp.data(), width_, height_, radius_);
    box_wrap(tmp.data(), out.data(), width_, height_, radius_);
}

Ssim::Stats Ssim::forward(std::span<const double> x, std::span<const double> y,
                          std::span<double> ssim) const {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    Stats s;
    s.mu_x.resize(n);
    s.mu_y.resize(n);
    s.var_x.resize(n);
    s.var_y.resize(n);
    s.cov_xy.resize(n);

    std::vector<double> prod(n);
    filter(x, s.mu_x);
    filter(y, s.mu_y);
    for (std::size_t i = 0; i < n; ++i) prod[i] = x[i] * x[i];
    filter(prod, s.var_x);
    for (std::size_t i = 0; i < n; ++i) prod[i] = y[i] * y[i];
    filter(prod, s.var_y);
    for (std::size_t i = 0; i < n; ++i) prod[i] = x[i] * y[i];
    filter(prod, s.cov_xy);

    for (std::size_t i = 0; i < n; ++i) {
        const double mx = s.mu_x[i], my = s.mu_y[i];
        s.var_x[i] -= mx * mx;
        s.var_y[i] -= my * my;
        s.cov_xy[i] -= mx * my;
        const double num = (2.0 * mx * my + c1_) * (2.0 * s.cov_xy[i] + c2_);
        const double den = (mx * mx + my * my + c1_) * (s.var_x[i] + s.var_y[i] + c2_);
        ssim[i] = num / den;
    }
    return s;
}

void Ssim::backward(const Stats& s, std::span<const double> x, std::span<const double> y,
                    std::span<const double> g, std::span<double> dy) const {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    std::vector<double> d_mu(n), d_syy(n), d_sxy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mx = s.mu_x[i], my = s.mu_y[i];
        const double a1 = 2.0 * mx * my + c1_;
        const double a2 = 2.0 * s.cov_xy[i] + c2_;
        const double b1 = mx * mx + my * my + c1_;
        const double b2 = s.var_x[i] + s.var_y[i] + c2_;
        const double value = a1 * a2 / (b1 * b2);

        const double ds_dmu = 2.0 * mx * a2 / (b1 * b2) - value * 2.0 * my / b1;
        const double ds_dcov = 2.0 * a1 / (b1 * b2);
        const double ds_dvar = -value / b2;

        // var_y = K(y^2) - mu_y^2 and cov = K(xy) - mu_x mu_y.
        d_mu[i] = g[i] * (ds_dmu - 2.0 * my * ds_dvar - mx * ds_dcov);
        d_syy[i] = g[i] * ds_dvar;
        d_sxy[i] = g[i] * ds_dcov;
    }
    std::vector<double> a(n), b(n), c(n);
    filter_adjoint(d_mu, a);
    filter_adjoint(d_syy, b);
    filter_adjoint(d_sxy, c);
    for (std::size_t i = 0; i < n; ++i) dy[i] = a[i] + 2.0 * y[i] * b[i] + x[i] * c[i];
}

}  // namespace sphlight
