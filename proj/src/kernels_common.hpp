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

// Real SH normalisation constants for bands 0..2.

namespace sphlight::kernels::detail {

inline constexpr double kY00 = 0.28209479177387814;   // 1 / (2 sqrt(pi))
inline constexpr double kY1 = 0.48860251190291992;    // sqrt(3 / (4 pi))
inline constexpr double kY2 = 1.0925484305920792;     // sqrt(15 / (4 pi))
inline constexpr double kY20 = 0.31539156525252005;   // sqrt(5 / (16 pi))
inline constexpr double kY22 = 0.54627421529603959;   // sqrt(15 / (16 pi))

}  // namespace sphlight::kernels::detail
