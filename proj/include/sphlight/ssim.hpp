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

#include <span>
#include <vector>

namespace sphlight {

/// Windowed SSIM on one W x H plane with a (2r+1)^2 box window. The window
/// wraps across the azimuth seam and clamps at the poles, so the local
/// statistics are a fixed linear operator K applied to x, y, x^2, y^2 and xy.
class Ssim {
public:
    struct Stats {
        std::vector<double> mu_x, mu_y, var_x, var_y, cov_xy;
    };

    Ssim(int width, int height, int radius = 3, double c1 = 1e-4, double c2 = 9e-4);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    /// Fills ssim (size W*H) and returns the local statistics needed by backward().
    Stats forward(std::span<const double> x, std::span<const double> y,
                  std::span<double> ssim) const;

    /// dy = d(sum_p g_p * ssim_p) / dy given upstream g = dL/dssim.
    void backward(const Stats& stats, std::span<const double> x, std::span<const double> y,
                  std::span<const double> g, std::span<double> dy) const;

    /// Applies the window operator K (local mean).
    void filter(std::span<const double> in, std::span<double> out) const;
    /// Applies K^T.
    void filter_adjoint(std::span<const double> in, std::span<double> out) const;

private:
    int width_;
    int height_;
    int radius_;
    double c1_;
    double c2_;
};

}  // namespace sphlight
