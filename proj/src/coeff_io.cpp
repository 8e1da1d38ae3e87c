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

#include "sphlight/coeff_io.hpp"

#include <fstream>

#include "sphlight/error.hpp"

namespace sphlight {

namespace {
constexpr const char* kChannelNames[kShChannels] = {"r", "g", "b"};
}

nlohmann::json coefficients_to_json(const ShCoefficients& coeffs) {
    nlohmann::json j;
    j["order"] = 2;
    j["layout"] = nlohmann::json::array();
    for (auto name : kShLayout) j["layout"].push_back(std::string(name));
    nlohmann::json channels = nlohmann::json::object();
    for (int c = 0; c < kShChannels; ++c) {
        const auto values = coeffs.channel(c);
        channels[kChannelNames[c]] = std::vector<double>(values.begin(), values.end());
    }
    j["channels"] = std::move(channels);
    return j;
}

ShCoefficients coefficients_from_json(const nlohmann::json& j, const std::string& origin) {
    try {
        if (j.at("order").get<int>() != 2) throw IoError(origin, "only order 2 is supported");
        const auto& layout = j.at("layout");
        if (!layout.is_array() || layout.size() != kShCount)
            throw IoError(origin, "layout must list 9 (l,m) entries");
        for (int k = 0; k < kShCount; ++k)
            if (layout[k].get<std::string>() != kShLayout[k])
                throw IoError(origin, "unexpected layout entry '" + layout[k].get<std::string>() +
                                          "' at index " + std::to_string(k));
        std::array<double, kShTotal> flat{};
        for (int c = 0; c < kShChannels; ++c) {
            const auto& values = j.at("channels").at(kChannelNames[c]);
            if (!values.is_array() || values.size() != kShCount)
                throw IoError(origin, std::string("channel '") + kChannelNames[c] +
                                          "' must hold 9 numbers");
            for (int k = 0; k < kShCount; ++k) flat[c * kShCount + k] = values[k].get<double>();
        }
        return ShCoefficients(flat);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(origin, std::string("malformed coefficient JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(origin, e.what());
    }
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open file for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(path.string(), "write failed");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open file for reading");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(path.string(), std::string("invalid JSON: ") + e.what(), e.byte);
    }
}

void save_coefficients(const ShCoefficients& coeffs, const std::filesystem::path& path) {
    write_json_file(coefficients_to_json(coeffs), path);
}

ShCoefficients load_coefficients(const std::filesystem::path& path) {
    return coefficients_from_json(read_json_file(path), path.string());
}

}  // namespace sphlight
