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

#include "sphlight/serialize.hpp"

namespace sphlight {

nlohmann::json to_json(const LossReport& report) {
    return {
        {"loss_sh", report.loss_sh},
        {"loss_rc", report.loss_rc},
        {"loss_rl", report.loss_rl},
        {"total", report.total},
        {"grad", report.grad},
        {"applied",
         {{"sh", report.applied.sh},
          {"rc", report.applied.rc},
          {"rl", report.applied.rl},
          {"prior", report.applied.prior}}},
    };
}

nlohmann::json to_json(const EvalResult& result) {
    return {
        {"m_rmse", result.m_rmse},
        {"scale", result.scale},
        {"per_channel", result.per_channel_rmse},
    };
}

}  // namespace sphlight
