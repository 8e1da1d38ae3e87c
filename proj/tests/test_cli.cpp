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

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphlight/coeff_io.hpp"
#include "sphlight/dataset.hpp"
#include "sphlight/image.hpp"
#include "sphlight/sh.hpp"
#include "support.hpp"

using namespace sphlight;
using testing::quote;
using testing::run_cli;
using testing::TempDir;
namespace fs = std::filesystem;

namespace {

std::vector<nlohmann::json> json_lines(const fs::path& p) {
    std::vector<nlohmann::json> out;
    std::istringstream in(testing::read_text(p));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line.front() == '{') out.push_back(nlohmann::json::parse(line));
    return out;
}

void save_uniform_probe(const fs::path& p, int w, int h, double value) {
    EquirectImage img(w, h);
    for (double& v : img.values()) v = value;
    save_hdr(img, p);
}

}  // namespace

TEST_CASE("project a uniform probe") {
    TempDir tmp;
    save_uniform_probe(tmp / "white.hdr", 512, 256, 1.0);
    REQUIRE(run_cli("project " + quote(tmp / "white.hdr") + " " + quote(tmp / "c.json")) == 0);
    const ShCoefficients c = load_coefficients(tmp / "c.json");
    // The grid sum of each basis function, not the continuous integral: the
    // midpoint rule leaves ~5e-5 in L20 at this height.
    const testing::OracleGrid grid(512, 256);
    for (int ch = 0; ch < 3; ++ch) {
        CHECK(c(ch, 0) == doctest::Approx(3.544908).epsilon(1e-5));
        for (int k = 0; k < 9; ++k) {
            double expected = 0.0;
            for (std::size_t i = 0; i < grid.d_omega.size(); ++i) expected += grid.basis[k][i] * grid.d_omega[i];
            CHECK(c(ch, k) == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("projection agrees across working resolutions") {
    TempDir tmp;
    SplitMix64 rng(5);
    save_hdr(testing::smooth_probe(1024, 512, rng), tmp / "p.hdr");
    REQUIRE(run_cli("project " + quote(tmp / "p.hdr") + " " + quote(tmp / "a.json") + " --size 256x128") == 0);
    REQUIRE(run_cli("project " + quote(tmp / "p.hdr") + " " + quote(tmp / "b.json")) == 0);
    const ShCoefficients a = load_coefficients(tmp / "a.json");
    const ShCoefficients b = load_coefficients(tmp / "b.json");
    for (int ch = 0; ch < 3; ++ch) CHECK(std::abs(a(ch, 0) - b(ch, 0)) <= 1e-2 * std::abs(b(ch, 0)));
}

TEST_CASE("missing input exits with status 2 and names the file") {
    TempDir tmp;
    const fs::path missing = tmp / "nowhere.hdr";
    CHECK(run_cli("project " + quote(missing) + " " + quote(tmp / "c.json"), tmp / "log") == 2);
    CHECK(testing::read_text(tmp / "log").find(missing.string()) != std::string::npos);
    CHECK_FALSE(fs::exists(tmp / "c.json"));
}

TEST_CASE("usage errors exit with status 2") {
    TempDir tmp;
    CHECK(run_cli("") == 2);
    CHECK(run_cli("no-such-command") == 2);
    save_uniform_probe(tmp / "w.hdr", 16, 8, 1.0);
    CHECK(run_cli("project " + quote(tmp / "w.hdr") + " " + quote(tmp / "c.json") + " --size 12") == 2);
    CHECK(run_cli("dering " + quote(tmp / "c.json")) == 2);
}

TEST_CASE("malformed coefficient file exits with status 2") {
    TempDir tmp;
    std::ofstream(tmp / "bad.json") << "{\"order\": 2, \"channels\": ";
    CHECK(run_cli("dering " + quote(tmp / "bad.json") + " " + quote(tmp / "o.json")) == 2);
}

TEST_CASE("project, reconstruct, project is a fixed point") {
    TempDir tmp;
    SplitMix64 rng(9);
    save_hdr(testing::smooth_probe(512, 256, rng), tmp / "p.hdr");
    REQUIRE(run_cli("project " + quote(tmp / "p.hdr") + " " + quote(tmp / "a.json")) == 0);
    REQUIRE(run_cli("reconstruct " + quote(tmp / "a.json") + " " + quote(tmp / "r.hdr")) == 0);
    REQUIRE(run_cli("project " + quote(tmp / "r.hdr") + " " + quote(tmp / "b.json")) == 0);
    const ShCoefficients a = load_coefficients(tmp / "a.json");
    const ShCoefficients b = load_coefficients(tmp / "b.json");
    // RGBE keeps about 8 bits per pixel; the projection averages that away.
    for (int ch = 0; ch < 3; ++ch)
        for (int k = 0; k < 9; ++k) CHECK(std::abs(a(ch, k) - b(ch, k)) <= 1e-3 * std::abs(a(ch, 0)));
}

TEST_CASE("relighting under unit irradiance reproduces the input") {
    TempDir tmp;
    SplitMix64 rng(2);
    testing::write_scene(tmp.path(), "scene", 64, 32, rng, 0.0, 1.0);
    ShCoefficients unit;
    for (int ch = 0; ch < 3; ++ch) unit.set(ch, 0, 2.0 / std::sqrt(std::numbers::pi) / 100.0);
    save_coefficients(unit, tmp / "unit.json");
    REQUIRE(run_cli("relight " + quote(tmp / "scene.png") + " " + quote(tmp / "scene_normals.pfm") + " " +
                    quote(tmp / "unit.json") + " " + quote(tmp / "out.png") + " --keep-size") == 0);
    CHECK(testing::read_bytes(tmp / "out.png") == testing::read_bytes(tmp / "scene.png"));
}

TEST_CASE("blend with weight one returns the first probe") {
    TempDir tmp;
    SplitMix64 rng(4);
    save_hdr(testing::smooth_probe(64, 32, rng), tmp / "a.hdr");
    save_hdr(testing::smooth_probe(64, 32, rng), tmp / "b.hdr");
    REQUIRE(run_cli("blend " + quote(tmp / "a.hdr") + " " + quote(tmp / "b.hdr") + " " +
                    quote(tmp / "o.hdr") + " --lambda 1 --keep-size") == 0);
    const EquirectImage a = load_hdr(tmp / "a.hdr");
    const EquirectImage o = load_hdr(tmp / "o.hdr");
    REQUIRE(o.same_size(a));
    const auto av = a.values();
    const auto ov = o.values();
    for (std::size_t i = 0; i < av.size(); ++i) REQUIRE(ov[i] == av[i]);
}

TEST_CASE("dering with cutoff one keeps only the ambient band") {
    TempDir tmp;
    ShCoefficients c;
    for (int ch = 0; ch < 3; ++ch)
        for (int k = 0; k < 9; ++k) c.set(ch, k, 1.0 + k + 10 * ch);
    save_coefficients(c, tmp / "c.json");
    REQUIRE(run_cli("dering " + quote(tmp / "c.json") + " " + quote(tmp / "d.json") + " --cutoff 1") == 0);
    const ShCoefficients d = load_coefficients(tmp / "d.json");
    for (int ch = 0; ch < 3; ++ch) {
        CHECK(d(ch, 0) == c(ch, 0));
        for (int k = 1; k < 9; ++k) CHECK(d(ch, k) == 0.0);
    }
    CHECK(run_cli("dering " + quote(tmp / "c.json") + " " + quote(tmp / "e.json") + " --cutoff 0") == 1);
}

TEST_CASE("prior command preserves the channel norm") {
    TempDir tmp;
    ShCoefficients c;
    for (int ch = 0; ch < 3; ++ch)
        for (int k = 0; k < 9; ++k) c.set(ch, k, std::sin(1.0 + k + 3 * ch));
    save_coefficients(c, tmp / "c.json");
    REQUIRE(run_cli("prior " + quote(tmp / "c.json") + " " + quote(tmp / "p.json")) == 0);
    const ShCoefficients p = load_coefficients(tmp / "p.json");
    for (int ch = 0; ch < 3; ++ch) {
        double norm = 0.0, sum = 0.0;
        for (int k = 0; k < 9; ++k) {
            norm += c(ch, k) * c(ch, k);
            sum += p(ch, k);
            CHECK(p(ch, k) > 0.0);
        }
        CHECK(sum == doctest::Approx(std::sqrt(norm)).epsilon(1e-12));
    }
}

TEST_CASE("config file values yield to command-line flags") {
    TempDir tmp;
    ShCoefficients c;
    for (int ch = 0; ch < 3; ++ch)
        for (int k = 0; k < 9; ++k) c.set(ch, k, 1.0);
    save_coefficients(c, tmp / "c.json");
    std::ofstream(tmp / "cfg.ini") << "[dering]\ncutoff=1\n";
    REQUIRE(run_cli("--config " + quote(tmp / "cfg.ini") + " dering " + quote(tmp / "c.json") + " " +
                    quote(tmp / "a.json")) == 0);
    REQUIRE(run_cli("--config " + quote(tmp / "cfg.ini") + " dering " + quote(tmp / "c.json") + " " +
                    quote(tmp / "b.json") + " --cutoff 2") == 0);
    CHECK(load_coefficients(tmp / "a.json")(0, 1) == 0.0);
    CHECK(load_coefficients(tmp / "b.json")(0, 1) == doctest::Approx(std::cos(std::numbers::pi / 4)));
    CHECK(load_coefficients(tmp / "b.json")(0, 4) == 0.0);
}

TEST_CASE("evaluate") {
    TempDir tmp;
    SplitMix64 rng(8);
    save_hdr(testing::smooth_probe(128, 64, rng), tmp / "p.hdr");
    REQUIRE(run_cli("project " + quote(tmp / "p.hdr") + " " + quote(tmp / "c.json")) == 0);

    SUBCASE("identical coefficients score zero") {
        REQUIRE(run_cli("evaluate " + quote(tmp / "c.json") + " " + quote(tmp / "c.json"), tmp / "out") == 0);
        const auto lines = json_lines(tmp / "out");
        REQUIRE(lines.size() == 1);
        CHECK(lines[0].at("m_rmse").get<double>() == 0.0);
    }
    SUBCASE("a scaled prediction scores zero") {
        ShCoefficients c = load_coefficients(tmp / "c.json");
        save_coefficients(c * 3.0, tmp / "s.json");
        REQUIRE(run_cli("evaluate " + quote(tmp / "s.json") + " " + quote(tmp / "c.json"), tmp / "out") == 0);
        CHECK(json_lines(tmp / "out").at(0).at("m_rmse").get<double>() < 1e-12);
    }
    SUBCASE("mixing json and hdr needs a size") {
        CHECK(run_cli("evaluate " + quote(tmp / "c.json") + " " + quote(tmp / "p.hdr")) == 2);
        REQUIRE(run_cli("evaluate " + quote(tmp / "c.json") + " " + quote(tmp / "p.hdr") + " --size 128x64",
                        tmp / "out") == 0);
        CHECK(json_lines(tmp / "out").at(0).at("m_rmse").get<double>() > 0.0);
    }
    SUBCASE("no inputs is a usage error") {
        CHECK(run_cli("evaluate") == 2);
    }
}

TEST_CASE("gradient check passes on twenty trials") {
    TempDir tmp;
    const int status = run_cli("grad-check --trials 20 --eps 1e-3", tmp / "out");
    const auto lines = json_lines(tmp / "out");
    REQUIRE(lines.size() == 1);
    for (const char* key : {"loss_sh", "loss_rc", "loss_rl", "total_with_prior"}) {
        INFO(key);
        CHECK(lines[0].at(key).get<double>() <= 1e-4);
    }
    CHECK(status == 0);
}

TEST_CASE("generate, fit and evaluate a dataset") {
    TempDir tmp;
    fs::create_directories(tmp / "probes");
    fs::create_directories(tmp / "scenes");
    SplitMix64 rng(21);
    for (int i = 0; i < 2; ++i)
        save_hdr(testing::smooth_probe(128, 64, rng), tmp / "probes" / ("p" + std::to_string(i) + ".hdr"));
    testing::write_scene(tmp / "scenes", "room", 128, 64, rng);

    const std::string gen = "gen-dataset --probes " + quote(tmp / "probes") + " --scenes " +
                            quote(tmp / "scenes") + " --count 2 --seed 77 --keep-size --out ";
    REQUIRE(run_cli(gen + quote(tmp / "ds")) == 0);
    REQUIRE(run_cli(gen + quote(tmp / "ds2")) == 0);
    for (const auto& entry : fs::directory_iterator(tmp / "ds"))
        CHECK(testing::read_bytes(entry.path()) ==
              testing::read_bytes(tmp / "ds2" / entry.path().filename()));

    const DatasetManifest m = DatasetManifest::from_json(read_json_file(tmp / "ds" / "manifest.json"));
    REQUIRE(m.entries.size() == 2);
    fs::create_directories(tmp / "pred");
    for (const auto& e : m.entries) {
        REQUIRE(run_cli("fit " + quote(tmp / "scenes" / "room.png") + " " + quote(tmp / "ds" / e.normals_path) +
                        " " + quote(tmp / "ds" / e.relit_ldr_path) + " --keep-size --out " +
                        quote(tmp / "pred" / e.gt_coeffs_path) + " --report " + quote(tmp / "report.json")) == 0);
        const auto report = read_json_file(tmp / "report.json");
        CHECK(report.at("method") == "lsq");
        CHECK(report.at("scale").get<double>() == 100.0);
    }
    REQUIRE(run_cli("evaluate --manifest " + quote(tmp / "ds" / "manifest.json") + " --predictions " +
                        quote(tmp / "pred"),
                    tmp / "out") == 0);
    const auto lines = json_lines(tmp / "out");
    REQUIRE(lines.size() == 3);
    const auto& summary = lines.back().at("summary");
    CHECK(summary.at("count") == 2);
    MESSAGE("dataset m-RMSE max " << summary.at("max").get<double>());
    CHECK(summary.at("max").get<double>() <= 1e-3);
}

TEST_CASE("fit option validation") {
    TempDir tmp;
    SplitMix64 rng(1);
    testing::write_scene(tmp.path(), "s", 32, 16, rng);
    const std::string inputs = quote(tmp / "s.png") + " " + quote(tmp / "s_normals.pfm") + " " +
                               quote(tmp / "s.png") + " --keep-size --out " + quote(tmp / "o.json");
    CHECK(run_cli("fit " + inputs + " --method newton") == 2);
    CHECK(run_cli("fit " + inputs + " --prior") == 2);
    CHECK(run_cli("fit " + inputs + " --method gd --weights 1,2") == 2);
    CHECK(run_cli("fit " + inputs + " --method gd --step -1") == 1);
}
