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
#include <functional>
#include <optional>
#include <vector>

#include "sphlight/image.hpp"
#include "sphlight/relight.hpp"
#include "sphlight/sh.hpp"
#include "sphlight/ssim.hpp"

namespace sphlight {

/// d(loss)/d(coefficients) in ShCoefficients flat layout.
using Gradient = std::array<double, kShTotal>;

struct LossValue {
    double value = 0.0;
    Gradient grad{};
    /// Per-channel parts of value. Every loss here is a sum of independent
    /// per-channel terms, and grad for channel c depends only on channel c.
    std::array<double, kShChannels> channel{};
};

struct LossWeights {
    double lambda_sh = 0.01;
    double lambda_rc = 0.3;
    double lambda_rl = 0.7;
    /// Share of the log-domain L1 term in the relighting loss; the rest is
    /// structural dissimilarity.
    double alpha = 0.85;

    /// Throws std::invalid_argument unless all weights are >= 0 and alpha is in [0, 1].
    void validate() const;
};

struct LossReport {
    double loss_sh = 0.0;
    double loss_rc = 0.0;
    double loss_rl = 0.0;
    double total = 0.0;
    /// d(total)/d(raw prediction), i.e. through the prior when it is on.
    Gradient grad{};
    /// Per-channel parts of total.
    std::array<double, kShChannels> channel_total{};
    struct Applied {
        bool sh = false;
        bool rc = false;
        bool rl = false;
        bool prior = false;
    } applied;
};

/// tau(v) = |v| softmax(v) for each channel's 9-vector; tau(0) = 0.
ShCoefficients spectral_prior(const ShCoefficients& raw);

/// J^T g for the prior's Jacobian at raw (zero at a zero channel).
Gradient spectral_prior_backward(const ShCoefficients& raw, const Gradient& grad_out);

/// Mean squared coefficient error over all 27 values.
LossValue loss_sh(const ShCoefficients& gt, const ShCoefficients& pred);

/// Attention-weighted squared difference of the two reconstructed maps at
/// width x height, divided by the pixel count.
LossValue loss_rc(const ShCoefficients& gt, const ShCoefficients& pred, int width, int height);

/// Photometric loss between a reference rendering and the base image
/// relit with a predicted lighting. Per pixel and channel:
///   alpha |G_ref - G_pred| + (1 - alpha) (1 - SSIM) / 2,   G = ln(1 + I)
/// weighted by the attention mask, averaged over channels and pixels.
class RelightingLoss {
public:
    /// `reference` is the target rendering in linear radiance. `mask`, when
    /// non-empty, holds one 0/1 flag per value of the image (channel-major);
    /// masked values are excluded, and a structural term only counts when its
    /// whole window is unmasked.
    RelightingLoss(EquirectImage base, const NormalMap& normals, EquirectImage reference,
                   double alpha, std::vector<std::uint8_t> mask = {});

    /// Reference rendered from the base with the given lighting.
    static RelightingLoss from_lighting(const EquirectImage& base, const NormalMap& normals,
                                        const ShCoefficients& gt, double alpha);

    LossValue evaluate(const ShCoefficients& pred) const;

    const EquirectImage& base() const noexcept { return base_; }
    const EquirectImage& reference() const noexcept { return reference_; }
    const NormalBasis& normal_basis() const noexcept { return basis_; }

private:
    EquirectImage base_;
    NormalBasis basis_;
    EquirectImage reference_;
    EquirectImage log_reference_;
    double alpha_;
    std::vector<double> l1_weight_;  // attention * mask, per value
    std::vector<double> sd_weight_;  // attention * window-complete mask, per value
    Ssim ssim_;
};

LossValue loss_rl(const EquirectImage& base, const NormalMap& normals, const ShCoefficients& gt,
                  const ShCoefficients& pred, double alpha);

/// Inputs of the weighted objective. A term whose weight is positive needs
/// its input: ground_truth for the coefficient and reconstruction terms,
/// photometric for the relighting term.
struct LossTerms {
    std::optional<ShCoefficients> ground_truth;
    const RelightingLoss* photometric = nullptr;
    int rc_width = 128;
    int rc_height = 64;
};

/// lambda_sh L_sh + lambda_rc L_rc + lambda_rl L_rl evaluated on
/// spectral_prior(raw_pred) when use_prior is set, else on raw_pred. Terms
/// with zero weight are skipped and reported as 0.
LossReport total_loss(const ShCoefficients& raw_pred, const LossTerms& terms,
                      const LossWeights& weights, bool use_prior);

struct GradientCheck {
    double max_relative_error = 0.0;
    int worst_index = -1;
    Gradient analytic{};
    Gradient numeric{};
};

using LossEvaluator = std::function<LossValue(const ShCoefficients&)>;

/// Central differences with step epsilon on each of the 27 coordinates;
/// error is |g_analytic - g_fd| / (|g_fd| + 1e-8).
GradientCheck check_gradients(const LossEvaluator& evaluator, const ShCoefficients& point,
                              double epsilon);

}  // namespace sphlight
