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

// Shared helpers for the test suites: scratch directories, an independent
// SH oracle and small on-disk fixtures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "sphlight/dataset.hpp"
#include "sphlight/image.hpp"
#include "sphlight/sh.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "sphlight-test-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::vector<char> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// Real SH from associated Legendre functions. std::assoc_legendre omits the
// Condon-Shortley phase, which matches the sign of the cartesian forms.
inline double sh_oracle(int l, int m, double theta, double phi) {
    const int am = std::abs(m);
    double ratio = 1.0;
    for (int i = l - am + 1; i <= l + am; ++i) ratio /= i;
    const double k = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * ratio);
    const double p = std::assoc_legendre(l, am, std::cos(theta));
    if (m == 0) return k * p;
    if (m > 0) return std::sqrt(2.0) * k * p * std::cos(am * phi);
    return std::sqrt(2.0) * k * p * std::sin(am * phi);
}

inline constexpr int kOracleL[9] = {0, 1, 1, 1, 2, 2, 2, 2, 2};
inline constexpr int kOracleM[9] = {0, -1, 0, 1, -2, -1, 0, 1, 2};

// Dense equirectangular grid with oracle basis values and solid angles,
// used for brute-force irradiance integrals.
struct OracleGrid {
    int width, height;
    std::vector<double> x, y, z, d_omega;
    std::vector<double> basis[9];

    OracleGrid(int w, int h) : width(w), height(h) {
        const std::size_t n = static_cast<std::size_t>(w) * h;
        x.resize(n);
        y.resize(n);
        z.resize(n);
        d_omega.resize(n);
        for (auto& b : basis) b.resize(n);
        const double pi = std::numbers::pi;
        for (int v = 0; v < h; ++v) {
            const double theta = pi * (v + 0.5) / h;
            for (int u = 0; u < w; ++u) {
                const double phi = 2.0 * pi * (u + 0.5) / w;
                const std::size_t i = static_cast<std::size_t>(v) * w + u;
                x[i] = std::sin(theta) * std::cos(phi);
                y[i] = std::sin(theta) * std::sin(phi);
                z[i] = std::cos(theta);
                d_omega[i] = std::sin(theta) * (2.0 * pi / w) * (pi / h);
                for (int k = 0; k < 9; ++k) basis[k][i] = sh_oracle(kOracleL[k], kOracleM[k], theta, phi);
            }
        }
    }

    // Cosine-weighted integral of the band-limited radiance over the
    // hemisphere around n, for one channel.
    double irradiance(const sphlight::ShCoefficients& l, int channel, const sphlight::Vec3& n) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double cosine = n.x * x[i] + n.y * y[i] + n.z * z[i];
            if (cosine <= 0.0) continue;
            double radiance = 0.0;
            for (int k = 0; k < 9; ++k) radiance += l(channel, k) * basis[k][i];
            sum += radiance * cosine * d_omega[i];
        }
        return sum;
    }
};

inline sphlight::Vec3 random_unit(sphlight::SplitMix64& rng) {
    for (;;) {
        const sphlight::Vec3 v{2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
        const double n = v.norm();
        if (n > 0.1 && n <= 1.0) return {v.x / n, v.y / n, v.z / n};
    }
}

// A smooth, strictly positive HDR probe: a bright lobe over an ambient floor.
inline sphlight::EquirectImage smooth_probe(int w, int h, sphlight::SplitMix64& rng) {
    const sphlight::Vec3 sun = random_unit(rng);
    const double tint[3] = {0.5 + rng.uniform(), 0.5 + rng.uniform(), 0.5 + rng.uniform()};
    const double ambient = 0.2 + 0.3 * rng.uniform();
    sphlight::EquirectImage img(w, h);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u) {
            const sphlight::Vec3 d = sphlight::pixel_to_direction(u, v, w, h).unit_vector();
            const double c = std::max(0.0, d.x * sun.x + d.y * sun.y + d.z * sun.z);
            for (int ch = 0; ch < 3; ++ch) img.at(u, v, ch) = ambient + 4.0 * tint[ch] * c * c;
        }
    return img;
}

// A scene whose LDR base stays far from saturation under the default x100
// scale: values in [lo, hi] with a sphere normal map.
inline void write_scene(const fs::path& dir, const std::string& name, int w, int h,
                        sphlight::SplitMix64& rng, double lo = 0.0004, double hi = 0.002) {
    sphlight::EquirectImage base(w, h);
    for (double& v : base.values()) v = lo + (hi - lo) * rng.uniform();
    sphlight::save_ldr(base, dir / (name + ".png"));
    sphlight::save_pfm(sphlight::NormalMap::sphere(w, h), dir / (name + "_normals.pfm"));
}

inline std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

inline std::string read_text(const fs::path& p) {
    const auto bytes = read_bytes(p);
    return {bytes.begin(), bytes.end()};
}

#ifdef SPHLIGHT_CLI
// Runs the command-line tool; returns its exit status.
inline int run_cli(const std::string& args, const fs::path& log = {}) {
    std::string cmd = std::string(SPHLIGHT_CLI) + " " + args;
    cmd += log.empty() ? " >/dev/null 2>&1" : " >" + quote(log) + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace testing
