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

// Random scenes and lightings for self-consistency checks (grad-check,
// recovery experiments). Deterministic given the generator state.

#include "sphlight/dataset.hpp"
#include "sphlight/image.hpp"
#include "sphlight/sh.hpp"

namespace sphlight::synthetic {

/// Independent uniform values in [lo, hi) for every pixel and channel.
EquirectImage random_image(int width, int height, double lo, double hi, SplitMix64& rng);

/// Uniform entries in [-1, 1).
ShCoefficients random_coefficients(SplitMix64& rng);

/// Deringed lighting with an ambient term in [1, 2) and higher bands up to
/// `detail` times the ambient, redrawn until the irradiance is at least a
/// quarter of the ambient irradiance for every normal.
ShCoefficients random_lighting(SplitMix64& rng, double detail = 0.3);

/// Smallest irradiance over all channels and a dense set of normals.
double min_irradiance(const ShCoefficients& coeffs);

/// A gradient-check instance whose neighborhood is smooth: irradiance stays
/// positive (no clamping) and the predicted rendering is brighter than the
/// reference everywhere (no sign change in the L1 term). With `through_prior`
/// the prediction is a raw vector meant to pass through spectral_prior().
struct GradientScene {
    EquirectImage base;
    NormalMap normals;
    ShCoefficients gt;
    ShCoefficients pred;
};

GradientScene gradient_scene(int width, int height, SplitMix64& rng, bool through_prior);

}  // namespace sphlight::synthetic
