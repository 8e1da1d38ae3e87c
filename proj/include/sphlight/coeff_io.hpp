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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sphlight/sh.hpp"

namespace sphlight {

/// {"order": 2, "layout": [...], "channels": {"r": [...], "g": [...], "b": [...]}}
nlohmann::json coefficients_to_json(const ShCoefficients& coeffs);

/// Validates order, layout and channel lengths. Throws IoError on mismatch.
ShCoefficients coefficients_from_json(const nlohmann::json& j, const std::string& origin = "<json>");

void save_coefficients(const ShCoefficients& coeffs, const std::filesystem::path& path);
ShCoefficients load_coefficients(const std::filesystem::path& path);

/// Pretty-prints with two-space indent and a trailing newline. Doubles are
/// written with round-trip precision (17 significant digits).
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace sphlight
