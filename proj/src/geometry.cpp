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

#include "sphlight/geometry.hpp"

#include <stdexcept>
#include <string>

namespace sphlight {

SphericalDirection pixel_to_direction(int u, int v, int width, int height) {
    if (width < 1 || height < 1)
        throw std::out_of_range("grid dimensions must be positive");
    if (u < 0 || u >= width || v < 0 || v >= height)
        throw std::out_of_range("pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                                ") outside " + std::to_string(width) + "x" +
                                std::to_string(height) + " grid");
    return {column_phi(u, width), row_theta(v, height)};
}

}  // namespace sphlight
