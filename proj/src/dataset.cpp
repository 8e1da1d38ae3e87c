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

#include "sphlight/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "sphlight/coeff_io.hpp"
#include "sphlight/error.hpp"
#include "sphlight/image.hpp"

namespace fs = std::filesystem;

namespace sphlight {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 rng(master + index * 0x9E3779B97F4A7C15ull);
    return rng.next();
}

nlohmann::json DatasetManifest::to_json() const {
    nlohmann::json entries_json = nlohmann::json::array();
    for (const auto& e : entries) {
        entries_json.push_back({
            {"relit_ldr_path", e.relit_ldr_path},
            {"normals_path", e.normals_path},
            {"gt_coeffs_path", e.gt_coeffs_path},
            {"scene_id", e.scene_id},
            {"probe_a_id", e.probe_a_id},
            {"probe_b_id", e.probe_b_id},
            {"lambda_blend", e.lambda_blend},
            {"seed", e.seed},
        });
    }
    return {{"version", kVersion}, {"entries", std::move(entries_json)}};
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
    if (j.at("version").get<std::string>() != kVersion)
        throw IoError("unsupported manifest version '" + j.at("version").get<std::string>() + "'");
    DatasetManifest m;
    for (const auto& e : j.at("entries")) {
        m.entries.push_back({e.at("relit_ldr_path").get<std::string>(),
                             e.at("normals_path").get<std::string>(),
                             e.at("gt_coeffs_path").get<std::string>(),
                             e.value("scene_id", std::string()),
                             e.at("probe_a_id").get<std::string>(),
                             e.at("probe_b_id").get<std::string>(),
                             e.at("lambda_blend").get<double>(),
                             e.at("seed").get<std::uint64_t>()});
    }
    return m;
}

namespace {

std::vector<fs::path> sorted_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError(dir.string(), "not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

struct Scene {
    std::string id;
    fs::path color;
    fs::path normals;
};

std::string sample_name(int index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "sample_%05d_%s", index, suffix);
    return buf;
}

}  // namespace

DatasetReport generate_dataset(const DatasetOptions& options) {
    if (options.count < 0) throw std::invalid_argument("sample count must be non-negative");
    if (options.lambda_blend && !(*options.lambda_blend >= 0.0 && *options.lambda_blend <= 1.0))
        throw std::invalid_argument("blend ratio must lie in [0, 1]");

    std::vector<fs::path> probes;
    for (const auto& f : sorted_files(options.probes_dir))
        if (f.extension() == ".hdr") probes.push_back(f);
    if (probes.size() < 2)
        throw IoError(options.probes_dir.string(), "need at least two .hdr probes, found " +
                                                       std::to_string(probes.size()));

    DatasetReport report;
    std::vector<Scene> scenes;
    {
        std::set<std::string> pngs, normal_maps;
        for (const auto& f : sorted_files(options.scenes_dir)) {
            const std::string stem = f.stem().string();
            if (f.extension() == ".png") pngs.insert(stem);
            if (f.extension() == ".pfm" && stem.size() > 8 &&
                stem.compare(stem.size() - 8, 8, "_normals") == 0)
                normal_maps.insert(stem.substr(0, stem.size() - 8));
        }
        for (const auto& id : pngs) {
            if (normal_maps.count(id))
                scenes.push_back({id, options.scenes_dir / (id + ".png"),
                                  options.scenes_dir / (id + "_normals.pfm")});
            else
                report.unpaired.push_back(id + ".png");
        }
        for (const auto& id : normal_maps)
            if (!pngs.count(id)) report.unpaired.push_back(id + "_normals.pfm");
    }
    if (options.count > 0 && scenes.empty())
        throw IoError(options.scenes_dir.string(), "no paired <name>.png + <name>_normals.pfm scenes");

    fs::create_directories(options.out_dir);

    std::map<std::size_t, EquirectImage> probe_cache;
    auto probe = [&](std::size_t i) -> const EquirectImage& {
        auto it = probe_cache.find(i);
        if (it == probe_cache.end()) {
            EquirectImage img = load_hdr(probes[i]);
            if (!options.keep_size) img = resize_bilinear(img, options.width, options.height);
            it = probe_cache.emplace(i, std::move(img)).first;
        }
        return it->second;
    };

    for (int i = 0; i < options.count; ++i) {
        const std::uint64_t seed = sample_seed(options.seed, static_cast<std::uint64_t>(i));
        SplitMix64 rng(seed);
        const std::size_t a = rng.below(probes.size());
        std::size_t b = rng.below(probes.size() - 1);
        if (b >= a) ++b;
        const std::size_t s = rng.below(scenes.size());
        const double lambda = options.lambda_blend ? *options.lambda_blend : rng.uniform();

        const Scene& scene = scenes[s];
        EquirectImage ldr = load_ldr(scene.color);
        NormalMap normals = load_pfm(scene.normals);
        if (!normals.same_size(ldr))
            throw IoError(scene.normals.string(),
                          "normal map is " + std::to_string(normals.width()) + "x" +
                              std::to_string(normals.height()) + " but " +
                              scene.color.filename().string() + " is " +
                              std::to_string(ldr.width()) + "x" + std::to_string(ldr.height()));
        if (!options.keep_size) {
            ldr = resize_bilinear(ldr, options.width, options.height);
            normals = resize_bilinear(normals, options.width, options.height);
        }

        const RelitSample sample =
            generate_relit_sample(ldr, normals, probe(a), probe(b), lambda, options.settings);

        ManifestEntry entry;
        entry.relit_ldr_path = sample_name(i, "relit.png");
        entry.normals_path = sample_name(i, "normals.pfm");
        entry.gt_coeffs_path = sample_name(i, "gt.json");
        entry.scene_id = scene.id;
        entry.probe_a_id = probes[a].stem().string();
        entry.probe_b_id = probes[b].stem().string();
        entry.lambda_blend = lambda;
        entry.seed = seed;

        save_ldr(sample.relit_ldr, options.out_dir / entry.relit_ldr_path);
        save_pfm(normals, options.out_dir / entry.normals_path);
        save_coefficients(sample.ground_truth, options.out_dir / entry.gt_coeffs_path);
        report.manifest.entries.push_back(std::move(entry));
    }

    write_json_file(report.manifest.to_json(), options.out_dir / "manifest.json");
    return report;
}

}  // namespace sphlight
