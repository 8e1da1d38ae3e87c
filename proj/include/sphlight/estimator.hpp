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
#include <cstdint>
#include <optional>
#include <vector>

#include "sphlight/image.hpp"
#include "sphlight/losses.hpp"
#include "sphlight/sh.hpp"

namespace sphlight {

enum class FitMethod { least_squares, gradient_descent };

struct FitConfig {
    FitMethod method = FitMethod::least_squares;
    int max_iters = 500;
    double step_size = 0.1;
    double momentum = 0.9;
    /// Tikhonov weight relative to the mean eigenvalue (trace / 9) of each
    /// channel's normal matrix.
    double ridge = 1e-8;
    bool use_prior = false;
    /// Stop when the loss changed by less than this fraction over 10 accepted steps.
    double convergence_tol = 1e-10;

    /// Throws std::invalid_argument on step_size <= 0, ridge < 0 or max_iters < 0.
    void validate() const;
};

/// Per-value 0/1 flags (channel-major, like EquirectImage::values()).
using ValueMask = std::vector<std::uint8_t>;

/// Weighted linear least squares for the lighting that reproduces `target`
/// as relight(base, normals, L), solved per channel from the 9x9 normal
/// equations. Pixels with invalid normals, zero base, or a cleared mask flag
/// contribute nothing. Throws ComputeError on a rank-deficient system when
/// ridge is 0.
ShCoefficients fit_least_squares(const EquirectImage& base, const NormalMap& normals,
                                 const EquirectImage& target, double ridge = 1e-8,
                                 const ValueMask& mask = {});

struct DescentResult {
    ShCoefficients coefficients;
    /// Total loss at the start and after every iteration; non-increasing.
    std::vector<double> trace;
    int iterations = 0;
};

/// Momentum descent on the weighted objective. Without ground truth only the
/// relighting term is active (the photometric-only configuration). Each colour
/// channel keeps its own step: a channel whose loss would rise keeps its old
/// values, drops its momentum and halves its step, while accepted steps grow
/// by 1.2 up to step_size. Throws ComputeError on a non-finite loss.
DescentResult fit_gradient_descent(const EquirectImage& base, const NormalMap& normals,
                                   const EquirectImage& target,
                                   const std::optional<ShCoefficients>& ground_truth,
                                   const LossWeights& weights, const FitConfig& config,
                                   const ValueMask& mask = {});

/// Ambient-only starting point: per channel, L00 such that a uniform light
/// turns mean(base) into mean(target).
ShCoefficients ambient_initialization(const EquirectImage& base, const EquirectImage& target);

enum class MedianMode { pooled, per_channel };

struct EvalResult {
    double m_rmse = 0.0;
    /// Median ratio applied to the prediction (pooled mode), or the mean of
    /// the per-channel ratios.
    double scale = 1.0;
    std::array<double, 3> channel_scale{1.0, 1.0, 1.0};
    std::array<double, 3> per_channel_rmse{};
};

/// Median-scaled RMSE under the spherical attention weighting. Throws
/// ComputeError when a median is not positive and std::invalid_argument on a
/// size mismatch.
EvalResult m_rmse(const EquirectImage& pred, const EquirectImage& gt,
                  MedianMode mode = MedianMode::pooled);

/// m_rmse of the two reconstructed environment maps.
EvalResult evaluate_pair(const ShCoefficients& pred, const ShCoefficients& gt, int width = 512,
                         int height = 256, MedianMode mode = MedianMode::pooled);

}  // namespace sphlight
