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

#include <json.hpp>

#include "sphlight/estimator.hpp"
#include "sphlight/losses.hpp"

namespace sphlight {

/// {"loss_sh", "loss_rc", "loss_rl", "total", "grad": [27], "applied": {...}}
nlohmann::json to_json(const LossReport& report);

/// {"m_rmse", "scale", "per_channel": [3]}
nlohmann::json to_json(const EvalResult& result);

}  // namespace sphlight
