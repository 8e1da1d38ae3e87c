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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphlight/relight.hpp"

namespace sphlight {

/// SplitMix64 (Steele, Lea & Flood). 64-bit state, advanced by the golden
/// gamma 0x9E3779B97F4A7C15 and finalized with the variant-13 mixer.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    /// Top 53 bits as a double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// floor(uniform() * n), n > 0.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    }

private:
    std::uint64_t state_;
};

/// Seed of sample `index`: the (index + 1)-th output of SplitMix64(master).
/// Distinct indices give distinct seeds.
std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index);

struct DatasetOptions {
    std::filesystem::path probes_dir;
    std::filesystem::path scenes_dir;
    std::filesystem::path out_dir;
    int count = 0;
    std::uint64_t seed = 0;
    /// Fixed blend ratio; nullopt draws one uniformly per sample.
    std::optional<double> lambda_blend = 0.5;
    int width = 512;
    int height = 256;
    bool keep_size = false;
    SampleSettings settings;
};

struct ManifestEntry {
    std::string relit_ldr_path;
    std::string normals_path;
    std::string gt_coeffs_path;
    std::string scene_id;
    std::string probe_a_id;
    std::string probe_b_id;
    double lambda_blend = 0.5;
    std::uint64_t seed = 0;
};

struct DatasetManifest {
    static constexpr const char* kVersion = "sphlight-dataset/1";
    std::vector<ManifestEntry> entries;

    nlohmann::json to_json() const;
    static DatasetManifest from_json(const nlohmann::json& j);
};

struct DatasetReport {
    DatasetManifest manifest;
    /// Scene files without their partner (png without _normals.pfm or vice versa).
    std::vector<std::string> unpaired;
};

/// Draws `count` samples: for each, a probe pair (uniform, without
/// replacement), a scene (uniform) and, when not fixed, a blend ratio, all
/// from SplitMix64(sample_seed(seed, i)) in that order. Writes
/// sample_NNNNN_{relit.png,normals.pfm,gt.json} and manifest.json into
/// out_dir; manifest paths are relative to out_dir. Throws IoError when fewer
/// than two probes exist, or when samples are requested but no scene is paired.
DatasetReport generate_dataset(const DatasetOptions& options);

}  // namespace sphlight
