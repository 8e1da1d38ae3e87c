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

#include "sphlight/synthetic.hpp"

#include <algorithm>
#include <limits>

#include "sphlight/losses.hpp"
#include "sphlight/relight.hpp"

namespace sphlight::synthetic {

EquirectImage random_image(int width, int height, double lo, double hi, SplitMix64& rng) {
    EquirectImage img(width, height);
    for (double& v : img.values()) v = lo + (hi - lo) * rng.uniform();
    return img;
}

ShCoefficients random_coefficients(SplitMix64& rng) {
    std::array<double, kShTotal> flat;
    for (double& v : flat) v = 2.0 * rng.uniform() - 1.0;
    return ShCoefficients(flat);
}

double min_irradiance(const ShCoefficients& coeffs) {
    static const NormalBasis probe(NormalMap::sphere(64, 32));
    const EquirectImage e = irradiance_map(probe, coeffs);
    const auto v = e.values();
    return *std::min_element(v.begin(), v.end());
}

ShCoefficients random_lighting(SplitMix64& rng, double detail) {
    const double c4 = RenderConstants::standard().c4;
    for (;;) {
        ShCoefficients l;
        double min_ambient = std::numeric_limits<double>::infinity();
        for (int c = 0; c < kShChannels; ++c) {
            const double ambient = 1.0 + rng.uniform();
            min_ambient = std::min(min_ambient, ambient);
            l.set(c, 0, ambient);
            for (int k = 1; k < kShCount; ++k)
                l.set(c, k, detail * ambient * (2.0 * rng.uniform() - 1.0));
        }
        l = dering(l, 3);
        if (min_irradiance(l) >= 0.25 * c4 * min_ambient) return l;
    }
}

GradientScene gradient_scene(int width, int height, SplitMix64& rng, bool through_prior) {
    GradientScene scene{random_image(width, height, 0.05, 1.0, rng),
                        NormalMap::sphere(width, height), {}, {}};
    for (;;) {
        scene.gt = random_lighting(rng, 0.2);
        ShCoefficients pred;
        for (int c = 0; c < kShChannels; ++c) {
            if (through_prior) {
                // Dominant first entry: tau() then yields a large ambient term.
                pred.set(c, 0, 4.0 + rng.uniform());
                for (int k = 1; k < kShCount; ++k) pred.set(c, k, rng.uniform() - 0.5);
            } else {
                pred.set(c, 0, scene.gt(c, 0) + 1.0 + rng.uniform());
                for (int k = 1; k < kShCount; ++k)
                    pred.set(c, k, scene.gt(c, k) + 0.2 * (rng.uniform() - 0.5));
            }
        }
        scene.pred = pred;
        const ShCoefficients effective = through_prior ? spectral_prior(pred) : pred;
        if (min_irradiance(effective - scene.gt) > 0.1 && min_irradiance(scene.gt) > 0.1)
            return scene;
    }
}

}  // namespace sphlight::synthetic
