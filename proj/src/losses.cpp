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

#include "sphlight/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphlight/grid.hpp"
#include "sphlight/kernels.hpp"
#include "sphlight/parallel.hpp"

namespace sphlight {

void LossWeights::validate() const {
    if (!(lambda_sh >= 0.0 && lambda_rc >= 0.0 && lambda_rl >= 0.0))
        throw std::invalid_argument("loss weights must be non-negative");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

ShCoefficients spectral_prior(const ShCoefficients& raw) {
    ShCoefficients out;
    for (int c = 0; c < kShChannels; ++c) {
        const auto v = raw.channel(c);
        double sq = 0.0;
        for (double x : v) sq += x * x;
        if (sq == 0.0) continue;
        const double norm = std::sqrt(sq);
        const double peak = *std::max_element(v.begin(), v.end());
        std::array<double, kShCount> e;
        double sum = 0.0;
        for (int k = 0; k < kShCount; ++k) sum += e[k] = std::exp(v[k] - peak);
        for (int k = 0; k < kShCount; ++k) out.set(c, k, norm * e[k] / sum);
    }
    return out;
}

Gradient spectral_prior_backward(const ShCoefficients& raw, const Gradient& grad_out) {
    Gradient g{};
    for (int c = 0; c < kShChannels; ++c) {
        const auto v = raw.channel(c);
        double sq = 0.0;
        for (double x : v) sq += x * x;
        if (sq == 0.0) continue;
        const double norm = std::sqrt(sq);
        const double peak = *std::max_element(v.begin(), v.end());
        std::array<double, kShCount> sigma;
        double sum = 0.0;
        for (int k = 0; k < kShCount; ++k) sum += sigma[k] = std::exp(v[k] - peak);
        double s = 0.0;
        for (int k = 0; k < kShCount; ++k) {
            sigma[k] /= sum;
            s += sigma[k] * grad_out[c * kShCount + k];
        }
        // J = sigma v^T / |v| + |v| (diag(sigma) - sigma sigma^T)
        for (int j = 0; j < kShCount; ++j)
            g[c * kShCount + j] =
                v[j] / norm * s + norm * sigma[j] * (grad_out[c * kShCount + j] - s);
    }
    return g;
}

LossValue loss_sh(const ShCoefficients& gt, const ShCoefficients& pred) {
    LossValue out;
    for (int i = 0; i < kShTotal; ++i) {
        const double d = pred.flat()[i] - gt.flat()[i];
        out.channel[i / kShCount] += d * d / kShTotal;
        out.grad[i] = 2.0 * d / kShTotal;
    }
    out.value = out.channel[0] + out.channel[1] + out.channel[2];
    return out;
}

LossValue loss_rc(const ShCoefficients& gt, const ShCoefficients& pred, int width, int height) {
    const auto grid = sphere_grid(width, height);
    const ShCoefficients diff = gt - pred;
    const EquirectImage d = reconstruct(diff, width, height);
    const auto& k = kernels::active();
    const auto& mask = grid->attention();

    // S_ck = sum_p A_p D_c(p) Y_k(p); value = sum_ck diff_ck S_ck / N.
    const auto s = reduce_rows<kShTotal>(height, [&](std::size_t v) {
        std::array<double, kShTotal> row{};
        const auto basis = grid->basis_row(static_cast<int>(v));
        for (int c = 0; c < kShChannels; ++c)
            k.weighted_dot(basis, d.channel(c).data() + v * width, mask.weights.data() + v * width,
                           width, row.data() + c * kShCount);
        return row;
    });

    const double n = static_cast<double>(width) * height;
    LossValue out;
    for (int i = 0; i < kShTotal; ++i) {
        out.channel[i / kShCount] += diff.flat()[i] * s[i] / n;
        out.grad[i] = -2.0 * s[i] / n;
    }
    for (double& c : out.channel) c = std::max(c, 0.0);
    out.value = out.channel[0] + out.channel[1] + out.channel[2];
    return out;
}

RelightingLoss::RelightingLoss(EquirectImage base, const NormalMap& normals,
                               EquirectImage reference, double alpha,
                               std::vector<std::uint8_t> mask)
    : base_(std::move(base)),
      basis_(normals),
      reference_(std::move(reference)),
      log_reference_(reference_.width(), reference_.height()),
      alpha_(alpha),
      ssim_(base_.width(), base_.height()) {
    if (!normals.same_size(base_) || !reference_.same_size(base_))
        throw std::invalid_argument("relighting loss inputs must share one size");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    base_.require_finite("base image");
    reference_.require_finite("reference image");
    const std::size_t values = base_.values().size();
    if (!mask.empty() && mask.size() != values)
        throw std::invalid_argument("mask must hold one flag per image value");

    const auto ref = reference_.values();
    auto logs = log_reference_.values();
    for (std::size_t i = 0; i < values; ++i) {
        if (ref[i] < 0.0) throw std::invalid_argument("reference radiance must be non-negative");
        logs[i] = std::log1p(ref[i]);
    }

    const int w = base_.width(), h = base_.height();
    const std::size_t plane = base_.pixel_count();
    const WeightMap attention = attention_mask(w, h);
    l1_weight_.resize(values);
    sd_weight_.resize(values);
    std::vector<double> plane_mask(plane), window(plane);
    for (int c = 0; c < kShChannels; ++c) {
        for (std::size_t i = 0; i < plane; ++i)
            plane_mask[i] = mask.empty() ? 1.0 : (mask[c * plane + i] ? 1.0 : 0.0);
        ssim_.filter(plane_mask, window);
        for (std::size_t i = 0; i < plane; ++i) {
            const double a = attention.weights[i];
            l1_weight_[c * plane + i] = a * plane_mask[i];
            sd_weight_[c * plane + i] = window[i] >= 1.0 - 1e-9 ? a : 0.0;
        }
    }
}

RelightingLoss RelightingLoss::from_lighting(const EquirectImage& base, const NormalMap& normals,
                                             const ShCoefficients& gt, double alpha) {
    return RelightingLoss(base, normals, relight(base, normals, gt), alpha);
}

LossValue RelightingLoss::evaluate(const ShCoefficients& pred) const {
    const int w = base_.width(), h = base_.height();
    const std::size_t plane = base_.pixel_count();
    const double norm = 1.0 / (kShChannels * static_cast<double>(plane));
    const EquirectImage irradiance = irradiance_map(basis_, pred);

    // Per value: contribution to the loss and d(loss)/d(irradiance).
    std::vector<double> contrib(base_.values().size(), 0.0);
    EquirectImage d_irr(w, h);
    std::vector<double> g(plane), d_g(plane), ssim(plane), d_ssim(plane), d_sd(plane);

    for (int c = 0; c < kShChannels; ++c) {
        const auto e = irradiance.channel(c);
        const auto b = base_.channel(c);
        const auto g_ref = log_reference_.channel(c);
        const double* l1w = l1_weight_.data() + c * plane;
        const double* sdw = sd_weight_.data() + c * plane;
        double* out = contrib.data() + c * plane;

        for (std::size_t i = 0; i < plane; ++i) g[i] = std::log1p(std::max(e[i], 0.0) * b[i]);

        for (std::size_t i = 0; i < plane; ++i) {
            const double r = g_ref[i] - g[i];
            out[i] = alpha_ * l1w[i] * std::abs(r);
            // sign(0) = 0 keeps the gradient zero at an exact match.
            d_g[i] = alpha_ * l1w[i] * (r > 0.0 ? -1.0 : (r < 0.0 ? 1.0 : 0.0));
        }

        if (alpha_ < 1.0) {
            const auto stats = ssim_.forward(g_ref, g, ssim);
            for (std::size_t i = 0; i < plane; ++i) {
                out[i] += (1.0 - alpha_) * sdw[i] * 0.5 * (1.0 - ssim[i]);
                d_ssim[i] = -(1.0 - alpha_) * sdw[i] * 0.5;
            }
            ssim_.backward(stats, g_ref, g, d_ssim, d_sd);
            for (std::size_t i = 0; i < plane; ++i) d_g[i] += d_sd[i];
        }

        auto de = d_irr.channel(c);
        for (std::size_t i = 0; i < plane; ++i) {
            const double radiance = std::max(e[i], 0.0) * b[i];
            de[i] = e[i] > 0.0 ? d_g[i] * b[i] / (1.0 + radiance) * norm : 0.0;
        }
    }

    std::vector<double> row_sums(static_cast<std::size_t>(kShChannels) * h);
    for (std::size_t r = 0; r < row_sums.size(); ++r)
        row_sums[r] = pairwise_sum(std::span<const double>(contrib.data() + r * w, w));

    const auto& k = kernels::active();
    const auto sums = reduce_rows<kShTotal>(h, [&](std::size_t v) {
        std::array<double, kShTotal> row{};
        const auto basis = basis_.row(static_cast<int>(v));
        for (int c = 0; c < kShChannels; ++c)
            k.weighted_dot(basis, d_irr.channel(c).data() + v * w, nullptr, w,
                           row.data() + c * kShCount);
        return row;
    });

    const auto& a_hat = RenderConstants::standard().a_hat;
    LossValue result;
    for (int c = 0; c < kShChannels; ++c)
        result.channel[c] =
            pairwise_sum(std::span<const double>(row_sums.data() + c * h, h)) * norm;
    result.value = result.channel[0] + result.channel[1] + result.channel[2];
    for (int c = 0; c < kShChannels; ++c)
        for (int i = 0; i < kShCount; ++i)
            result.grad[c * kShCount + i] = sums[c * kShCount + i] * a_hat[kShBand[i]];
    return result;
}

LossValue loss_rl(const EquirectImage& base, const NormalMap& normals, const ShCoefficients& gt,
                  const ShCoefficients& pred, double alpha) {
    return RelightingLoss::from_lighting(base, normals, gt, alpha).evaluate(pred);
}

LossReport total_loss(const ShCoefficients& raw_pred, const LossTerms& terms,
                      const LossWeights& weights, bool use_prior) {
    weights.validate();
    const ShCoefficients pred = use_prior ? spectral_prior(raw_pred) : raw_pred;

    LossReport report;
    report.applied.prior = use_prior;
    Gradient grad{};
    auto accumulate = [&](double lambda, const LossValue& v) {
        for (int i = 0; i < kShTotal; ++i) grad[i] += lambda * v.grad[i];
        for (int c = 0; c < kShChannels; ++c) report.channel_total[c] += lambda * v.channel[c];
    };

    if (weights.lambda_sh > 0.0 || weights.lambda_rc > 0.0) {
        if (!terms.ground_truth)
            throw std::invalid_argument("coefficient and reconstruction terms need ground truth");
    }
    if (weights.lambda_sh > 0.0) {
        const auto v = loss_sh(*terms.ground_truth, pred);
        report.loss_sh = v.value;
        report.applied.sh = true;
        accumulate(weights.lambda_sh, v);
    }
    if (weights.lambda_rc > 0.0) {
        const auto v = loss_rc(*terms.ground_truth, pred, terms.rc_width, terms.rc_height);
        report.loss_rc = v.value;
        report.applied.rc = true;
        accumulate(weights.lambda_rc, v);
    }
    if (weights.lambda_rl > 0.0) {
        if (!terms.photometric) throw std::invalid_argument("relighting term needs a scene");
        const auto v = terms.photometric->evaluate(pred);
        report.loss_rl = v.value;
        report.applied.rl = true;
        accumulate(weights.lambda_rl, v);
    }

    report.total = weights.lambda_sh * report.loss_sh + weights.lambda_rc * report.loss_rc +
                   weights.lambda_rl * report.loss_rl;
    report.grad = use_prior ? spectral_prior_backward(raw_pred, grad) : grad;
    return report;
}

GradientCheck check_gradients(const LossEvaluator& evaluator, const ShCoefficients& point,
                              double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    GradientCheck check;
    check.analytic = evaluator(point).grad;
    for (int i = 0; i < kShTotal; ++i) {
        auto plus = point.flat();
        auto minus = point.flat();
        plus[i] += epsilon;
        minus[i] -= epsilon;
        const double fp = evaluator(ShCoefficients(plus)).value;
        const double fm = evaluator(ShCoefficients(minus)).value;
        check.numeric[i] = (fp - fm) / (2.0 * epsilon);
        const double err =
            std::abs(check.analytic[i] - check.numeric[i]) / (std::abs(check.numeric[i]) + 1e-8);
        if (err > check.max_relative_error || check.worst_index < 0) {
            check.max_relative_error = std::max(err, check.max_relative_error);
            check.worst_index = i;
        }
    }
    return check;
}

}  // namespace sphlight
