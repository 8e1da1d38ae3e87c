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

#include <doctest.h>

#include <cstdint>
#include <vector>

#include "sphlight/coeff_io.hpp"
#include "sphlight/dataset.hpp"
#include "sphlight/error.hpp"
#include "support.hpp"

using namespace sphlight;
using testing::TempDir;
namespace fs = std::filesystem;

namespace {

// Reference outputs of the published SplitMix64 generator.
TEST_CASE("splitmix64 matches reference outputs") {
    SplitMix64 a(1234567);
    const std::uint64_t expected_a[] = {6457827717110365317ull, 3203168211198807973ull,
                                        9817491932198370423ull, 4593380528125082431ull,
                                        16408922859458223821ull};
    for (std::uint64_t e : expected_a) CHECK(a.next() == e);

    SplitMix64 b(0);
    const std::uint64_t expected_b[] = {16294208416658607535ull, 7960286522194355700ull,
                                        487617019471545679ull};
    for (std::uint64_t e : expected_b) CHECK(b.next() == e);
}

TEST_CASE("sample seeds are successive generator outputs") {
    const std::uint64_t expected[] = {13679457532755275413ull, 2949826092126892291ull,
                                      5139283748462763858ull, 6349198060258255764ull};
    for (std::uint64_t i = 0; i < 4; ++i) CHECK(sample_seed(42, i) == expected[i]);

    SplitMix64 rng(987654321);
    for (std::uint64_t i = 0; i < 50; ++i) CHECK(sample_seed(987654321, i) == rng.next());
}

TEST_CASE("uniform draws stay in [0, 1)") {
    SplitMix64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(rng.below(5) < 5u);
    }
}

struct Fixture {
    TempDir root;
    fs::path probes = root / "probes";
    fs::path scenes = root / "scenes";

    explicit Fixture(int probe_count = 2, int scene_count = 1) {
        fs::create_directories(probes);
        fs::create_directories(scenes);
        SplitMix64 rng(11);
        for (int i = 0; i < probe_count; ++i)
            save_hdr(testing::smooth_probe(64, 32, rng), probes / ("probe" + std::to_string(i) + ".hdr"));
        for (int i = 0; i < scene_count; ++i)
            testing::write_scene(scenes, "scene" + std::to_string(i), 64, 32, rng);
    }

    DatasetOptions options(const fs::path& out, int count) const {
        DatasetOptions opt;
        opt.probes_dir = probes;
        opt.scenes_dir = scenes;
        opt.out_dir = out;
        opt.count = count;
        opt.seed = 2024;
        opt.width = 64;
        opt.height = 32;
        return opt;
    }
};

}  // namespace

TEST_CASE("zero samples give an empty manifest") {
    Fixture fx;
    const DatasetReport report = generate_dataset(fx.options(fx.root / "out", 0));
    CHECK(report.manifest.entries.empty());
    const auto j = read_json_file(fx.root / "out" / "manifest.json");
    CHECK(j.at("entries").empty());
}

TEST_CASE("three samples from two probes and one scene") {
    Fixture fx;
    const fs::path out = fx.root / "out";
    const DatasetReport report = generate_dataset(fx.options(out, 3));
    REQUIRE(report.manifest.entries.size() == 3);
    CHECK(report.unpaired.empty());
    for (std::size_t i = 0; i < 3; ++i) {
        const ManifestEntry& e = report.manifest.entries[i];
        CHECK(e.lambda_blend == 0.5);
        CHECK(e.scene_id == "scene0");
        CHECK(e.probe_a_id != e.probe_b_id);
        CHECK(e.seed == sample_seed(2024, i));
        CHECK(fs::exists(out / e.relit_ldr_path));
        CHECK(fs::exists(out / e.normals_path));
        const ShCoefficients gt = load_coefficients(out / e.gt_coeffs_path);
        CHECK(gt(0, 0) > 0.0);
    }
    const DatasetManifest back = DatasetManifest::from_json(read_json_file(out / "manifest.json"));
    CHECK(back.entries.size() == 3);
}

TEST_CASE("generation is byte-identical across runs") {
    Fixture fx(3, 2);
    DatasetOptions first = fx.options(fx.root / "a", 4);
    DatasetOptions second = fx.options(fx.root / "b", 4);
    first.lambda_blend.reset();
    second.lambda_blend.reset();
    generate_dataset(first);
    generate_dataset(second);

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(fx.root / "a"))
        names.push_back(entry.path().filename().string());
    CHECK(names.size() == 13);
    for (const auto& name : names) {
        INFO(name);
        CHECK(testing::read_bytes(fx.root / "a" / name) == testing::read_bytes(fx.root / "b" / name));
    }
}

TEST_CASE("random blend ratios are drawn per sample") {
    Fixture fx;
    DatasetOptions opt = fx.options(fx.root / "out", 5);
    opt.lambda_blend.reset();
    const DatasetReport report = generate_dataset(opt);
    for (const auto& e : report.manifest.entries) {
        CHECK(e.lambda_blend >= 0.0);
        CHECK(e.lambda_blend < 1.0);
    }
    CHECK(report.manifest.entries[0].lambda_blend != report.manifest.entries[1].lambda_blend);
}

TEST_CASE("a single probe is rejected") {
    Fixture fx(1, 1);
    CHECK_THROWS_AS(generate_dataset(fx.options(fx.root / "out", 1)), IoError);
}

TEST_CASE("unpaired scene files are reported and skipped") {
    Fixture fx;
    SplitMix64 rng(3);
    testing::write_scene(fx.scenes, "lonely", 64, 32, rng);
    fs::remove(fx.scenes / "lonely_normals.pfm");
    save_pfm(NormalMap::sphere(64, 32), fx.scenes / "orphan_normals.pfm");

    const DatasetReport report = generate_dataset(fx.options(fx.root / "out", 4));
    CHECK(report.unpaired == std::vector<std::string>{"lonely.png", "orphan_normals.pfm"});
    for (const auto& e : report.manifest.entries) CHECK(e.scene_id == "scene0");
}

TEST_CASE("no paired scenes with samples requested is an error") {
    Fixture fx(2, 0);
    CHECK_THROWS_AS(generate_dataset(fx.options(fx.root / "out", 1)), IoError);
    CHECK_NOTHROW(generate_dataset(fx.options(fx.root / "out", 0)));
}

TEST_CASE("invalid options") {
    Fixture fx;
    DatasetOptions opt = fx.options(fx.root / "out", -1);
    CHECK_THROWS_AS(generate_dataset(opt), std::invalid_argument);
    opt.count = 1;
    opt.lambda_blend = 1.5;
    CHECK_THROWS_AS(generate_dataset(opt), std::invalid_argument);
}

TEST_CASE("manifest json roundtrip") {
    DatasetManifest m;
    m.entries.push_back({"r.png", "n.pfm", "g.json", "s", "pa", "pb", 0.25, 18446744073709551615ull});
    const DatasetManifest back = DatasetManifest::from_json(m.to_json());
    REQUIRE(back.entries.size() == 1);
    const ManifestEntry& e = back.entries[0];
    CHECK(e.relit_ldr_path == "r.png");
    CHECK(e.normals_path == "n.pfm");
    CHECK(e.gt_coeffs_path == "g.json");
    CHECK(e.scene_id == "s");
    CHECK(e.probe_a_id == "pa");
    CHECK(e.probe_b_id == "pb");
    CHECK(e.lambda_blend == 0.25);
    CHECK(e.seed == 18446744073709551615ull);

    nlohmann::json bad = m.to_json();
    bad["version"] = "other/9";
    CHECK_THROWS_AS(DatasetManifest::from_json(bad), IoError);
}
