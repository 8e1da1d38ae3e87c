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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sphlight/error.hpp"
#include "sphlight/estimator.hpp"
#include "sphlight/relight.hpp"
#include "sphlight/serialize.hpp"
#include "sphlight/synthetic.hpp"
#include "support.hpp"

using namespace sphlight;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

struct Scene {
    EquirectImage base;
    NormalMap normals;
    ShCoefficients gt;
    EquirectImage target;
};

Scene synthetic_scene(int w, int h, SplitMix64& rng) {
    Scene s{synthetic::random_image(w, h, 0.05, 1.0, rng), NormalMap::sphere(w, h),
            synthetic::random_lighting(rng), EquirectImage(1, 1)};
    s.target = relight(s.base, s.normals, s.gt);
    return s;
}

}  // namespace

TEST_CASE("least squares recovers noiseless lighting") {
    SplitMix64 rng(1);
    for (int t = 0; t < 3; ++t) {
        const Scene s = synthetic_scene(128, 64, rng);
        const ShCoefficients fit = fit_least_squares(s.base, s.normals, s.target);
        CHECK((fit - s.gt).max_abs() <= 1e-6);
    }
}

TEST_CASE("least squares on a black target") {
    SplitMix64 rng(2);
    const Scene s = synthetic_scene(32, 16, rng);
    const ShCoefficients fit = fit_least_squares(s.base, s.normals, EquirectImage(32, 16));
    CHECK(fit.max_abs() == 0.0);
}

TEST_CASE("least squares normal equations are stationary") {
    SplitMix64 rng(3);
    Scene s = synthetic_scene(64, 32, rng);
    // Perturb the target so the residual is nonzero.
    for (double& v : s.target.values()) v *= 0.9 + 0.2 * rng.uniform();
    const ShCoefficients fit = fit_least_squares(s.base, s.normals, s.target, 0.0);
    const EquirectImage pred = relight(s.base, s.normals, fit);
    const WeightMap dw = solid_angle_weights(64, 32);
    for (int c = 0; c < 3; ++c) {
        double grad[9] = {}, scale = 0;
        for (int v = 0; v < 32; ++v)
            for (int u = 0; u < 64; ++u) {
                const ShBasis b = irradiance_basis(s.normals.at(u, v));
                const double r = pred.at(u, v, c) - s.target.at(u, v, c);
                for (int k = 0; k < 9; ++k) {
                    const double term = dw.at(u, v) * s.base.at(u, v, c) * b[k];
                    grad[k] += term * r;
                    scale += std::abs(term * s.target.at(u, v, c));
                }
            }
        double norm = 0;
        for (double g : grad) norm += g * g;
        CHECK(std::sqrt(norm) <= 1e-8 * scale);
    }
}

TEST_CASE("single-plane normals are rank deficient") {
    const int w = 32, h = 16;
    const NormalMap plane = NormalMap::uniform(w, h, Vec3{0, 0, 1});
    SplitMix64 rng(4);
    const EquirectImage base = synthetic::random_image(w, h, 0.1, 1, rng);
    const ShCoefficients gt = synthetic::random_lighting(rng);
    const EquirectImage target = relight(base, plane, gt);
    CHECK_THROWS_AS(fit_least_squares(base, plane, target, 0.0), ComputeError);

    const ShCoefficients fit = fit_least_squares(base, plane, target, 1e-8);
    const auto e_fit = irradiance_at(Vec3{0, 0, 1}, fit);
    const auto e_gt = irradiance_at(Vec3{0, 0, 1}, gt);
    for (int c = 0; c < 3; ++c) CHECK(e_fit[c] == Approx(e_gt[c]).epsilon(1e-6));
}

TEST_CASE("invalid normals and zero base contribute nothing") {
    SplitMix64 rng(5);
    Scene s = synthetic_scene(64, 32, rng);
    NormalMap holes = s.normals;
    for (int u = 0; u < 64; u += 3) {
        holes.set(u, 10, Vec3{0, 0, 0});
        s.target.at(u, 10, 0) = 1e6;  // garbage that must be ignored
        s.base.at(u, 11, 1) = 0.0;
        s.target.at(u, 11, 1) = -1e6;
    }
    const ShCoefficients fit = fit_least_squares(s.base, holes, s.target);
    CHECK((fit - s.gt).max_abs() <= 1e-6);
}

TEST_CASE("gradient descent, photometric only") {
    SplitMix64 rng(6);
    const Scene s = synthetic_scene(128, 64, rng);
    FitConfig cfg;
    cfg.method = FitMethod::gradient_descent;
    const DescentResult r = fit_gradient_descent(s.base, s.normals, s.target, std::nullopt, LossWeights{}, cfg);
    CHECK(r.iterations <= 500);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-6);
    const EvalResult e = evaluate_pair(r.coefficients, s.gt, 128, 64);
    CHECK(e.m_rmse <= 1e-3);

    const ShCoefficients lsq = fit_least_squares(s.base, s.normals, s.target);
    CHECK(evaluate_pair(r.coefficients, lsq, 128, 64).m_rmse <= 1e-3);
}

TEST_CASE("gradient descent dominated by the coefficient loss") {
    SplitMix64 rng(7);
    const Scene s = synthetic_scene(32, 16, rng);
    // Images unrelated to the ground truth.
    const EquirectImage noise = synthetic::random_image(32, 16, 0.1, 1, rng);
    FitConfig cfg;
    cfg.method = FitMethod::gradient_descent;
    cfg.max_iters = 2000;
    const DescentResult r =
        fit_gradient_descent(s.base, s.normals, noise, s.gt, LossWeights{100, 0, 0.001, 0.85}, cfg);
    CHECK((r.coefficients - s.gt).max_abs() <= 1e-4);
}

TEST_CASE("gradient descent edge cases") {
    SplitMix64 rng(8);
    const Scene s = synthetic_scene(32, 16, rng);
    FitConfig cfg;
    cfg.method = FitMethod::gradient_descent;
    cfg.max_iters = 0;
    const DescentResult r = fit_gradient_descent(s.base, s.normals, s.target, std::nullopt, LossWeights{}, cfg);
    CHECK(r.coefficients == ambient_initialization(s.base, s.target));
    CHECK(r.trace.size() == 1);

    const ShCoefficients init = ambient_initialization(EquirectImage::constant(8, 4, 0.5),
                                                       EquirectImage::constant(8, 4, 0.5 * kPi));
    CHECK(init(0, 0) == Approx(2 * std::sqrt(kPi)).epsilon(1e-12));

    cfg.max_iters = 10;
    cfg.step_size = -1;
    CHECK_THROWS_AS(fit_gradient_descent(s.base, s.normals, s.target, std::nullopt, LossWeights{}, cfg),
                    std::invalid_argument);

    cfg.step_size = 1e-2;
    cfg.use_prior = true;
    const DescentResult p = fit_gradient_descent(s.base, s.normals, s.target, std::nullopt, LossWeights{}, cfg);
    for (double v : p.coefficients.flat()) CHECK(v > 0.0);
}

TEST_CASE("median-scaled RMSE") {
    SplitMix64 rng(9);
    const EquirectImage gt = synthetic::random_image(64, 32, 0.1, 2, rng);
    CHECK(m_rmse(gt, gt).m_rmse == 0.0);

    EquirectImage twice = gt;
    for (double& v : twice.values()) v *= 2;
    const EvalResult e = m_rmse(twice, gt);
    CHECK(e.scale == 0.5);
    CHECK(e.m_rmse == 0.0);

    // One hemisphere (u < W/2) at 3 against a constant 1: the pooled median
    // ratio is 1 / ((1 + 3) / 2) = 0.5, leaving errors of -0.5 and +0.5.
    const EquirectImage ones = EquirectImage::constant(64, 32, 1.0);
    EquirectImage half = ones;
    for (int c = 0; c < 3; ++c)
        for (int v = 0; v < 32; ++v)
            for (int u = 0; u < 32; ++u) half.at(u, v, c) = 3.0;
    const EvalResult hh = m_rmse(half, ones);
    CHECK(hh.scale == 0.5);
    CHECK(hh.m_rmse == Approx(0.5).epsilon(1e-12));

    // Per-channel medians.
    const EvalResult pc = m_rmse(twice, gt, MedianMode::per_channel);
    CHECK(pc.m_rmse <= 1e-15);

    CHECK_THROWS_AS(m_rmse(EquirectImage(64, 32), gt), ComputeError);
    CHECK_THROWS_AS(m_rmse(gt, EquirectImage(8, 8)), std::invalid_argument);

    const auto j = to_json(hh);
    CHECK(j.at("m_rmse").get<double>() == hh.m_rmse);
    CHECK(j.at("scale").get<double>() == 0.5);
    CHECK(j.at("per_channel").size() == 3);
}

TEST_CASE("metric homogeneity and positivity") {
    SplitMix64 rng(10);
    for (int t = 0; t < 10; ++t) {
        const EquirectImage a = synthetic::random_image(32, 16, 0.1, 2, rng);
        EquirectImage b = a;
        for (double& v : b.values()) v *= 0.8 + 0.4 * rng.uniform();
        const double base = m_rmse(a, b).m_rmse;
        CHECK(base > 0.0);
        for (double c : {0.1, 2.0, 10.0}) {
            EquirectImage ca = a, cb = b;
            for (double& v : ca.values()) v *= c;
            for (double& v : cb.values()) v *= c;
            CHECK(m_rmse(ca, cb).m_rmse == Approx(c * base).epsilon(1e-12));
            CHECK(m_rmse(ca, a).m_rmse <= 1e-12);
        }
    }
}

TEST_CASE("coefficient evaluation") {
    SplitMix64 rng(11);
    const ShCoefficients gt = synthetic::random_lighting(rng);
    CHECK(evaluate_pair(gt, gt).m_rmse == 0.0);
    CHECK(evaluate_pair(2.0 * gt, gt).m_rmse <= 1e-12);
    CHECK(evaluate_pair(dering(gt, 1), gt).m_rmse > 0.0);
}
