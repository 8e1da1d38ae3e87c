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

#include "sphlight/estimator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sphlight/error.hpp"
#include "sphlight/grid.hpp"
#include "sphlight/kernels.hpp"
#include "sphlight/parallel.hpp"
#include "sphlight/relight.hpp"

namespace sphlight {

void FitConfig::validate() const {
    if (!(step_size > 0.0)) throw std::invalid_argument("step size must be positive");
    if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be non-negative");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
    if (!(momentum >= 0.0 && momentum < 1.0))
        throw std::invalid_argument("momentum must lie in [0, 1)");
}

namespace {

void check_inputs(const EquirectImage& base, const NormalMap& normals, const EquirectImage& target,
                  const ValueMask& mask) {
    if (!base.same_size(target) || !normals.same_size(base))
        throw std::invalid_argument(
            "base " + std::to_string(base.width()) + "x" + std::to_string(base.height()) +
            ", normals " + std::to_string(normals.width()) + "x" +
            std::to_string(normals.height()) + " and target " + std::to_string(target.width()) +
            "x" + std::to_string(target.height()) + " must match");
    if (!mask.empty() && mask.size() != base.values().size())
        throw std::invalid_argument("mask must hold one flag per image value");
    base.require_finite("base image");
    target.require_finite("target image");
}

constexpr std::size_t kGram = kernels::kGramCount;
constexpr std::size_t kPerChannel = kGram + kShCount;

double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

ShCoefficients fit_least_squares(const EquirectImage& base, const NormalMap& normals,
                                 const EquirectImage& target, double ridge, const ValueMask& mask) {
    check_inputs(base, normals, target, mask);
    if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be non-negative");

    const int w = base.width(), h = base.height();
    const std::size_t plane = base.pixel_count();
    const NormalBasis basis(normals);
    const WeightMap solid = solid_angle_weights(w, h);
    const auto& k = kernels::active();

    // Per row: packed gram of (base * Y) and the right-hand side, for each channel.
    const auto sums = reduce_rows<kShChannels * kPerChannel>(h, [&](std::size_t v) {
        std::array<double, kShChannels * kPerChannel> row{};
        std::vector<double> gram_w(w), rhs_f(w);
        const auto brow = basis.row(static_cast<int>(v));
        for (int c = 0; c < kShChannels; ++c) {
            const double* b = base.channel(c).data() + v * w;
            const double* t = target.channel(c).data() + v * w;
            const std::uint8_t* m = mask.empty() ? nullptr : mask.data() + c * plane + v * w;
            for (int u = 0; u < w; ++u) {
                const double keep = (m == nullptr || m[u]) ? 1.0 : 0.0;
                const double dw = solid.weights[v * w + u] * keep;
                gram_w[u] = dw * b[u] * b[u];
                rhs_f[u] = dw * b[u] * t[u];
            }
            double* out = row.data() + c * kPerChannel;
            k.gram(brow, gram_w.data(), w, out);
            k.weighted_dot(brow, rhs_f.data(), nullptr, w, out + kGram);
        }
        return row;
    });

    const auto& a_hat = RenderConstants::standard().a_hat;
    ShCoefficients result;
    for (int c = 0; c < kShChannels; ++c) {
        const double* s = sums.data() + c * kPerChannel;
        Eigen::Matrix<double, kShCount, kShCount> normal;
        Eigen::Matrix<double, kShCount, 1> rhs;
        for (int j = 0; j < kShCount; ++j) {
            const double aj = a_hat[kShBand[j]];
            rhs(j) = aj * s[kGram + j];
            for (int i = j; i < kShCount; ++i) {
                const double value = aj * a_hat[kShBand[i]] * s[kernels::gram_index(j, i)];
                normal(j, i) = value;
                normal(i, j) = value;
            }
        }

        const double trace = normal.trace();
        if (trace <= 0.0) {
            if (ridge == 0.0)
                throw ComputeError("least-squares system for channel " + std::to_string(c) +
                                   " has no contributing pixels");
            continue;  // minimum-norm solution of an empty system
        }
        if (ridge == 0.0) {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, kShCount, kShCount>> eig(
                normal, Eigen::EigenvaluesOnly);
            const auto& ev = eig.eigenvalues();
            if (ev.minCoeff() <= 1e-12 * ev.maxCoeff())
                throw ComputeError("least-squares system for channel " + std::to_string(c) +
                                   " is rank-deficient (normal coverage too narrow); use a "
                                   "positive ridge");
        }
        normal.diagonal().array() += ridge * trace / kShCount;
        const Eigen::Matrix<double, kShCount, 1> x = normal.ldlt().solve(rhs);
        for (int j = 0; j < kShCount; ++j) result.set(c, j, x(j));
    }
    return result;
}

ShCoefficients ambient_initialization(const EquirectImage& base, const EquirectImage& target) {
    const double c4 = RenderConstants::standard().c4;
    ShCoefficients init;
    for (int c = 0; c < kShChannels; ++c) {
        const auto b = base.channel(c);
        const auto t = target.channel(c);
        const double mb = pairwise_sum(b) / static_cast<double>(b.size());
        const double mt = pairwise_sum(t) / static_cast<double>(t.size());
        init.set(c, 0, mb > 0.0 ? mt / mb / c4 : 0.0);
    }
    return init;
}

DescentResult fit_gradient_descent(const EquirectImage& base, const NormalMap& normals,
                                   const EquirectImage& target,
                                   const std::optional<ShCoefficients>& ground_truth,
                                   const LossWeights& weights, const FitConfig& config,
                                   const ValueMask& mask) {
    check_inputs(base, normals, target, mask);
    config.validate();
    weights.validate();

    LossWeights active = weights;
    if (!ground_truth) {
        active.lambda_sh = 0.0;
        active.lambda_rc = 0.0;
    }
    const RelightingLoss photometric(base, normals, target, active.alpha, mask);
    LossTerms terms;
    terms.ground_truth = ground_truth;
    terms.photometric = &photometric;
    terms.rc_width = base.width();
    terms.rc_height = base.height();

    auto evaluate = [&](const ShCoefficients& x) {
        return total_loss(x, terms, active, config.use_prior);
    };

    DescentResult result{ambient_initialization(base, target), {}, 0};
    LossReport current = evaluate(result.coefficients);
    result.trace.push_back(current.total);

    // The objective is a sum of independent per-channel terms, so each channel
    // runs its own momentum descent with its own step control. A channel that
    // has reached the kink of the L1 term then cannot veto progress elsewhere.
    std::array<double, kShChannels> step;
    step.fill(config.step_size);
    Gradient velocity{};
    const double min_step = config.step_size * 1e-12;
    for (int it = 0; it < config.max_iters; ++it) {
        result.iterations = it + 1;
        Gradient next_velocity;
        std::array<double, kShTotal> next = result.coefficients.flat();
        for (int i = 0; i < kShTotal; ++i) {
            next_velocity[i] = config.momentum * velocity[i] - step[i / kShCount] * current.grad[i];
            next[i] += next_velocity[i];
            if (!std::isfinite(next[i]))
                throw ComputeError("gradient descent diverged at iteration " + std::to_string(it));
        }
        const LossReport trial = evaluate(ShCoefficients(next));
        if (!std::isfinite(trial.total))
            throw ComputeError("non-finite loss at iteration " + std::to_string(it) +
                               "; reduce the step size");

        // Accepted channels regrow their step toward the configured size; a
        // channel whose loss rose keeps its old values, drops its momentum and
        // halves its step.
        std::array<double, kShTotal> accepted = result.coefficients.flat();
        bool moving = false;
        for (int c = 0; c < kShChannels; ++c) {
            const bool keep = trial.channel_total[c] <= current.channel_total[c];
            for (int k = 0; k < kShCount; ++k) {
                const int i = c * kShCount + k;
                if (keep) {
                    accepted[i] = next[i];
                    velocity[i] = next_velocity[i];
                    current.grad[i] = trial.grad[i];
                } else {
                    velocity[i] = 0.0;
                }
            }
            if (keep) {
                current.channel_total[c] = trial.channel_total[c];
                step[c] = std::min(step[c] * 1.2, config.step_size);
            } else {
                step[c] *= 0.5;
            }
            moving = moving || step[c] >= min_step;
        }
        result.coefficients = ShCoefficients(accepted);
        current.total = current.channel_total[0] + current.channel_total[1] + current.channel_total[2];
        result.trace.push_back(current.total);
        if (!moving) break;

        const std::size_t n = result.trace.size();
        if (n > 10) {
            const double before = result.trace[n - 11];
            if (before - current.total <= config.convergence_tol * std::abs(before)) break;
        }
    }
    if (config.use_prior) result.coefficients = spectral_prior(result.coefficients);
    return result;
}

EvalResult m_rmse(const EquirectImage& pred, const EquirectImage& gt, MedianMode mode) {
    if (!pred.same_size(gt))
        throw std::invalid_argument("prediction and ground truth maps differ in size");
    pred.require_finite("prediction map");
    gt.require_finite("ground-truth map");

    EvalResult result;
    auto ratio = [](std::span<const double> p, std::span<const double> g) {
        const double mg = median_of({g.begin(), g.end()});
        const double mp = median_of({p.begin(), p.end()});
        if (!(mg > 0.0)) throw ComputeError("ground-truth median is not positive");
        if (!(mp > 0.0)) throw ComputeError("prediction median is not positive; scale undefined");
        return mg / mp;
    };
    if (mode == MedianMode::pooled) {
        result.scale = ratio(pred.values(), gt.values());
        result.channel_scale.fill(result.scale);
    } else {
        double sum = 0.0;
        for (int c = 0; c < 3; ++c) sum += result.channel_scale[c] = ratio(pred.channel(c), gt.channel(c));
        result.scale = sum / 3.0;
    }

    const int w = gt.width(), h = gt.height();
    const auto grid = sphere_grid(w, h);
    const WeightMap& a = grid->attention();
    const auto sums = reduce_rows<4>(h, [&](std::size_t v) {
        std::array<double, 4> row{};
        for (int u = 0; u < w; ++u) {
            const std::size_t i = v * w + u;
            row[3] += a.weights[i];
            for (int c = 0; c < 3; ++c) {
                const double d = result.channel_scale[c] * pred.channel(c)[i] - gt.channel(c)[i];
                row[c] += a.weights[i] * d * d;
            }
        }
        return row;
    });
    for (int c = 0; c < 3; ++c) result.per_channel_rmse[c] = std::sqrt(sums[c] / sums[3]);
    result.m_rmse = std::sqrt((sums[0] + sums[1] + sums[2]) / (3.0 * sums[3]));
    return result;
}

EvalResult evaluate_pair(const ShCoefficients& pred, const ShCoefficients& gt, int width,
                         int height, MedianMode mode) {
    return m_rmse(reconstruct(pred, width, height), reconstruct(gt, width, height), mode);
}

}  // namespace sphlight
