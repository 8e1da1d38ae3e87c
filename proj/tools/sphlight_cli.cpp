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

// sphlight command-line front end.
//
// Exit codes: 0 success, 1 computation error, 2 I/O, format or usage error.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphlight/coeff_io.hpp"
#include "sphlight/dataset.hpp"
#include "sphlight/error.hpp"
#include "sphlight/estimator.hpp"
#include "sphlight/image.hpp"
#include "sphlight/losses.hpp"
#include "sphlight/parallel.hpp"
#include "sphlight/relight.hpp"
#include "sphlight/serialize.hpp"
#include "sphlight/sh.hpp"
#include "sphlight/synthetic.hpp"

namespace fs = std::filesystem;
using namespace sphlight;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Size {
    int width = 512;
    int height = 256;
};

Size parse_size(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw UsageError("size must look like WxH, got '" + text + "'");
    Size s;
    const char* begin = text.data();
    const auto r1 = std::from_chars(begin, begin + x, s.width);
    const auto r2 = std::from_chars(begin + x + 1, begin + text.size(), s.height);
    if (r1.ec != std::errc{} || r1.ptr != begin + x || r2.ec != std::errc{} ||
        r2.ptr != begin + text.size() || s.width < 1 || s.height < 1)
        throw UsageError("size must look like WxH, got '" + text + "'");
    return s;
}

std::string lower_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

bool is_ldr_path(const fs::path& p) { return lower_extension(p) == ".png"; }

EquirectImage load_image(const fs::path& p) {
    const std::string ext = lower_extension(p);
    if (ext == ".png") return load_ldr(p);
    if (ext == ".hdr" || ext == ".pic" || ext == ".rgbe") return load_hdr(p);
    throw IoError(p.string(), "unsupported image extension (expected .png or .hdr)");
}

// Resizing shared by every command that reads images.
struct SizeOptions {
    std::string size;
    bool keep_size = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--size", size, "working resolution WxH (default 512x256)");
        cmd->add_flag("--keep-size", keep_size, "process inputs at their native resolution");
    }
    Size target() const { return size.empty() ? Size{} : parse_size(size); }

    EquirectImage apply(const EquirectImage& img) const {
        if (keep_size) return img;
        const Size s = target();
        return resize_bilinear(img, s.width, s.height);
    }
    NormalMap apply(const NormalMap& n) const {
        if (keep_size) return n;
        const Size s = target();
        return resize_bilinear(n, s.width, s.height);
    }
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw UsageError("expected a comma-separated list of numbers, got '" + text + "'");
        out.push_back(v);
    }
    return out;
}

void print_json_line(const nlohmann::json& j) { std::cout << j.dump() << '\n'; }

// ---------------------------------------------------------------------------

struct ProjectCmd {
    std::string in, out;
    bool uniform_weights = false;
    SizeOptions size;

    void run() const {
        const EquirectImage img = size.apply(load_hdr(in));
        const auto measure =
            uniform_weights ? ProjectionMeasure::uniform : ProjectionMeasure::solid_angle;
        save_coefficients(project(img, measure), out);
    }
};

struct ReconstructCmd {
    std::string in, out, size;

    void run() const {
        const Size s = size.empty() ? Size{} : parse_size(size);
        save_hdr(reconstruct(load_coefficients(in), s.width, s.height), out);
    }
};

struct RelightCmd {
    std::string ldr, normals, coeffs, out;
    double scale = 100.0;
    SizeOptions size;

    void run() const {
        const EquirectImage base = size.apply(load_ldr(ldr));
        const NormalMap n = size.apply(load_pfm(normals));
        const ShCoefficients l = load_coefficients(coeffs) * scale;
        save_ldr(relight(base, n, l), out);
    }
};

struct BlendCmd {
    std::string a, b, out;
    double lambda_blend = 0.5;
    SizeOptions size;

    void run() const {
        const EquirectImage ia = size.apply(load_hdr(a));
        const EquirectImage ib = size.apply(load_hdr(b));
        save_hdr(blend_lights(ia, ib, lambda_blend), out);
    }
};

struct DeringCmd {
    std::string in, out;
    int cutoff = 3;

    void run() const { save_coefficients(dering(load_coefficients(in), cutoff), out); }
};

struct PriorCmd {
    std::string in, out;

    void run() const { save_coefficients(spectral_prior(load_coefficients(in)), out); }
};

struct GenDatasetCmd {
    std::string probes, scenes, out, lambda = "0.5";
    int count = 0;
    std::uint64_t seed = 0;
    double scale = 100.0;
    int cutoff = 3;
    SizeOptions size;

    void run() const {
        DatasetOptions opt;
        opt.probes_dir = probes;
        opt.scenes_dir = scenes;
        opt.out_dir = out;
        opt.count = count;
        opt.seed = seed;
        if (lambda == "random") {
            opt.lambda_blend.reset();
        } else {
            const auto v = parse_list(lambda);
            if (v.size() != 1) throw UsageError("--lambda expects a number or 'random'");
            opt.lambda_blend = v[0];
        }
        const Size s = size.target();
        opt.width = s.width;
        opt.height = s.height;
        opt.keep_size = size.keep_size;
        opt.settings.ldr_scale = scale;
        opt.settings.dering_cutoff = cutoff;
        const DatasetReport report = generate_dataset(opt);
        for (const auto& name : report.unpaired)
            std::cerr << "sphlight: warning: skipping unpaired scene file " << name << '\n';
        std::cerr << "sphlight: wrote " << report.manifest.entries.size() << " samples ("
                  << report.unpaired.size() << " warnings)\n";
    }
};

struct FitCmd {
    std::string base, normals, target, out, report, gt, method = "lsq", weights;
    bool prior = false;
    std::optional<double> scale;
    double alpha = 0.85;
    double ridge = 1e-8;
    int iters = 500;
    double step = 0.1;
    double momentum = 0.9;
    SizeOptions size;

    void run() const {
        if (method != "lsq" && method != "gd")
            throw UsageError("--method must be 'lsq' or 'gd', got '" + method + "'");
        if (prior && method == "lsq")
            throw UsageError("--prior only applies to --method gd");

        const EquirectImage base_img = size.apply(load_image(base));
        const NormalMap normal_map = size.apply(load_pfm(normals));
        EquirectImage target_img = size.apply(load_image(target));

        // Clipped LDR values carry no radiometric information.
        ValueMask mask;
        const bool ldr_target = is_ldr_path(target);
        if (ldr_target) {
            const auto v = target_img.values();
            mask.resize(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) mask[i] = (v[i] > 0.0 && v[i] < 1.0) ? 1 : 0;
        }
        const double s = scale.value_or(ldr_target ? 100.0 : 1.0);
        if (!(s > 0.0)) throw std::invalid_argument("--scale must be positive");
        for (double& v : target_img.values()) v /= s;

        LossWeights w;
        w.alpha = alpha;
        if (!weights.empty()) {
            const auto lw = parse_list(weights);
            if (lw.size() != 3) throw UsageError("--weights expects three values: sh,rc,rl");
            w.lambda_sh = lw[0];
            w.lambda_rc = lw[1];
            w.lambda_rl = lw[2];
        }
        w.validate();

        std::optional<ShCoefficients> ground_truth;
        if (!gt.empty()) ground_truth = load_coefficients(gt);

        nlohmann::json extra;
        ShCoefficients result;
        if (method == "lsq") {
            result = fit_least_squares(base_img, normal_map, target_img, ridge, mask);
        } else {
            FitConfig cfg;
            cfg.method = FitMethod::gradient_descent;
            cfg.max_iters = iters;
            cfg.step_size = step;
            cfg.momentum = momentum;
            cfg.use_prior = prior;
            cfg.validate();
            DescentResult r =
                fit_gradient_descent(base_img, normal_map, target_img, ground_truth, w, cfg, mask);
            result = r.coefficients;
            extra["iterations"] = r.iterations;
            extra["trace"] = r.trace;
        }
        save_coefficients(result, out);

        if (!report.empty()) {
            const RelightingLoss photometric(base_img, normal_map, target_img, w.alpha, mask);
            LossTerms terms;
            terms.ground_truth = ground_truth;
            terms.photometric = &photometric;
            terms.rc_width = base_img.width();
            terms.rc_height = base_img.height();
            LossWeights rw = w;
            if (!ground_truth) rw.lambda_sh = rw.lambda_rc = 0.0;
            nlohmann::json j = to_json(total_loss(result, terms, rw, false));
            j["method"] = method;
            j["weights"] = {{"lambda_sh", rw.lambda_sh},
                            {"lambda_rc", rw.lambda_rc},
                            {"lambda_rl", rw.lambda_rl},
                            {"alpha", rw.alpha}};
            j["prior"] = prior;
            j["scale"] = s;
            for (auto& [k, v] : extra.items()) j[k] = v;
            write_json_file(j, report);
        }
    }
};

struct EvaluateCmd {
    std::string pred, gt, size, manifest, predictions;
    bool per_channel = false;

    MedianMode mode() const { return per_channel ? MedianMode::per_channel : MedianMode::pooled; }

    EvalResult evaluate_one(const fs::path& p, const fs::path& g) const {
        const bool pj = lower_extension(p) == ".json";
        const bool gj = lower_extension(g) == ".json";
        if (pj && gj) {
            const Size s = size.empty() ? Size{} : parse_size(size);
            return evaluate_pair(load_coefficients(p), load_coefficients(g), s.width, s.height,
                                 mode());
        }
        if (pj != gj && size.empty())
            throw UsageError("mixing coefficient JSON and HDR inputs requires --size");
        auto dense = [&](const fs::path& path, bool json) {
            if (json) {
                const Size s = parse_size(size);
                return reconstruct(load_coefficients(path), s.width, s.height);
            }
            EquirectImage img = load_hdr(path);
            if (!size.empty()) {
                const Size s = parse_size(size);
                img = resize_bilinear(img, s.width, s.height);
            }
            return img;
        };
        return m_rmse(dense(p, pj), dense(g, gj), mode());
    }

    void run() const {
        if (manifest.empty()) {
            if (pred.empty() || gt.empty())
                throw UsageError("evaluate needs <pred> <gt> or --manifest with --predictions");
            print_json_line(to_json(evaluate_one(pred, gt)));
            return;
        }
        if (predictions.empty()) throw UsageError("--manifest requires --predictions DIR");
        const fs::path mpath = manifest;
        const DatasetManifest m = DatasetManifest::from_json(read_json_file(mpath));
        const fs::path root = mpath.parent_path();
        const std::size_t n = m.entries.size();
        std::vector<EvalResult> results(n);
        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const fs::path g = root / m.entries[i].gt_coeffs_path;
                results[i] = evaluate_one(fs::path(predictions) / g.filename(), g);
            }
        });
        std::vector<double> values;
        for (std::size_t i = 0; i < n; ++i) {
            nlohmann::json j = to_json(results[i]);
            j["gt"] = m.entries[i].gt_coeffs_path;
            print_json_line(j);
            values.push_back(results[i].m_rmse);
        }
        nlohmann::json summary{{"count", n}};
        if (n > 0) {
            double sum = 0.0;
            for (double v : values) sum += v;
            std::sort(values.begin(), values.end());
            const double median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
            summary["mean"] = sum / static_cast<double>(n);
            summary["median"] = median;
            summary["max"] = values.back();
        }
        print_json_line({{"summary", summary}});
    }
};

struct GradCheckCmd {
    int trials = 20;
    double eps = 1e-3;
    std::uint64_t seed = 1;
    std::string size = "128x64";
    double alpha = 0.85;
    double tolerance = 1e-4;

    int run() const {
        if (trials < 1) throw std::invalid_argument("--trials must be at least 1");
        const Size s = parse_size(size);
        SplitMix64 rng(seed);
        double worst_sh = 0.0, worst_rc = 0.0, worst_rl = 0.0, worst_total = 0.0;
        for (int t = 0; t < trials; ++t) {
            const auto scene = synthetic::gradient_scene(s.width, s.height, rng, false);
            worst_sh = std::max(worst_sh,
                                check_gradients([&](const ShCoefficients& p) { return loss_sh(scene.gt, p); },
                                                scene.pred, eps)
                                    .max_relative_error);
            worst_rc = std::max(worst_rc, check_gradients(
                                              [&](const ShCoefficients& p) {
                                                  return loss_rc(scene.gt, p, s.width, s.height);
                                              },
                                              scene.pred, eps)
                                              .max_relative_error);
            const auto photometric =
                RelightingLoss::from_lighting(scene.base, scene.normals, scene.gt, alpha);
            worst_rl = std::max(worst_rl, check_gradients(
                                              [&](const ShCoefficients& p) {
                                                  return photometric.evaluate(p);
                                              },
                                              scene.pred, eps)
                                              .max_relative_error);

            const auto pscene = synthetic::gradient_scene(s.width, s.height, rng, true);
            const auto pphoto =
                RelightingLoss::from_lighting(pscene.base, pscene.normals, pscene.gt, alpha);
            LossTerms terms;
            terms.ground_truth = pscene.gt;
            terms.photometric = &pphoto;
            terms.rc_width = s.width;
            terms.rc_height = s.height;
            LossWeights w;
            w.alpha = alpha;
            worst_total = std::max(worst_total, check_gradients(
                                                    [&](const ShCoefficients& p) {
                                                        const LossReport r = total_loss(p, terms, w, true);
                                                        return LossValue{r.total, r.grad};
                                                    },
                                                    pscene.pred, eps)
                                                    .max_relative_error);
        }
        const double worst = std::max({worst_sh, worst_rc, worst_rl, worst_total});
        print_json_line({{"trials", trials},
                         {"eps", eps},
                         {"loss_sh", worst_sh},
                         {"loss_rc", worst_rc},
                         {"loss_rl", worst_rl},
                         {"total_with_prior", worst_total},
                         {"max_relative_error", worst}});
        return worst <= tolerance ? 0 : 1;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical-harmonic lighting toolkit"};
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.require_subcommand(1);

    ProjectCmd project_cmd;
    auto* project = app.add_subcommand("project", "project an HDR panorama onto SH coefficients");
    project->add_option("in", project_cmd.in, "input .hdr")->required();
    project->add_option("out", project_cmd.out, "output coefficient JSON")->required();
    project->add_flag("--uniform-weights", project_cmd.uniform_weights,
                      "use uniform 4pi/N pixel weights instead of solid angle");
    project_cmd.size.add_to(project);

    ReconstructCmd reconstruct_cmd;
    auto* reconstruct_sc = app.add_subcommand("reconstruct", "render coefficients to an HDR panorama");
    reconstruct_sc->add_option("in", reconstruct_cmd.in, "coefficient JSON")->required();
    reconstruct_sc->add_option("out", reconstruct_cmd.out, "output .hdr")->required();
    reconstruct_sc->add_option("--size", reconstruct_cmd.size, "output resolution WxH (default 512x256)");

    RelightCmd relight_cmd;
    auto* relight_sc = app.add_subcommand("relight", "relight an LDR panorama under new lighting");
    relight_sc->add_option("ldr", relight_cmd.ldr, "base .png")->required();
    relight_sc->add_option("normals", relight_cmd.normals, "normal map .pfm")->required();
    relight_sc->add_option("coeffs", relight_cmd.coeffs, "lighting JSON")->required();
    relight_sc->add_option("out", relight_cmd.out, "output .png")->required();
    relight_sc->add_option("--scale", relight_cmd.scale, "lighting scale (default 100)");
    relight_cmd.size.add_to(relight_sc);

    BlendCmd blend_cmd;
    auto* blend = app.add_subcommand("blend", "convex blend of two HDR probes");
    blend->add_option("a", blend_cmd.a, "probe A .hdr")->required();
    blend->add_option("b", blend_cmd.b, "probe B .hdr")->required();
    blend->add_option("out", blend_cmd.out, "output .hdr")->required();
    blend->add_option("--lambda", blend_cmd.lambda_blend, "weight of probe A (default 0.5)");
    blend_cmd.size.add_to(blend);

    DeringCmd dering_cmd;
    auto* dering_sc = app.add_subcommand("dering", "window the higher SH bands");
    dering_sc->add_option("in", dering_cmd.in, "coefficient JSON")->required();
    dering_sc->add_option("out", dering_cmd.out, "output JSON")->required();
    dering_sc->add_option("--cutoff", dering_cmd.cutoff, "window cutoff band (default 3)");

    PriorCmd prior_cmd;
    auto* prior = app.add_subcommand("prior", "apply the spectral prior to raw coefficients");
    prior->add_option("in", prior_cmd.in, "coefficient JSON")->required();
    prior->add_option("out", prior_cmd.out, "output JSON")->required();

    GenDatasetCmd gen_cmd;
    auto* gen = app.add_subcommand("gen-dataset", "generate relit training samples");
    gen->add_option("--probes", gen_cmd.probes, "directory of .hdr probes")->required();
    gen->add_option("--scenes", gen_cmd.scenes, "directory of <name>.png + <name>_normals.pfm")
        ->required();
    gen->add_option("--out", gen_cmd.out, "output directory")->required();
    gen->add_option("--count", gen_cmd.count, "number of samples")->required();
    gen->add_option("--seed", gen_cmd.seed, "master seed (default 0)");
    gen->add_option("--lambda", gen_cmd.lambda, "blend weight or 'random' (default 0.5)");
    gen->add_option("--scale", gen_cmd.scale, "lighting scale for the relit PNG (default 100)");
    gen->add_option("--cutoff", gen_cmd.cutoff, "dering cutoff (default 3)");
    gen_cmd.size.add_to(gen);

    FitCmd fit_cmd;
    auto* fit = app.add_subcommand("fit", "estimate lighting from a relit image");
    fit->add_option("base", fit_cmd.base, "base image .png or .hdr")->required();
    fit->add_option("normals", fit_cmd.normals, "normal map .pfm")->required();
    fit->add_option("target", fit_cmd.target, "relit image .png or .hdr")->required();
    fit->add_option("--out", fit_cmd.out, "output coefficient JSON")->required();
    fit->add_option("--method", fit_cmd.method, "lsq or gd (default lsq)");
    fit->add_flag("--prior", fit_cmd.prior, "optimize through the spectral prior (gd only)");
    fit->add_option("--weights", fit_cmd.weights, "loss weights sh,rc,rl (default 0.01,0.3,0.7)");
    fit->add_option("--alpha", fit_cmd.alpha, "L1/SSIM balance of the relighting loss (default 0.85)");
    fit->add_option("--gt", fit_cmd.gt, "ground-truth coefficients for the SH and RC terms");
    fit->add_option("--scale", fit_cmd.scale,
                    "lighting scale baked into the target (default 100 for .png, 1 for .hdr)");
    fit->add_option("--ridge", fit_cmd.ridge, "relative ridge for least squares (default 1e-8)");
    fit->add_option("--iters", fit_cmd.iters, "gradient descent iterations (default 500)");
    fit->add_option("--step", fit_cmd.step, "gradient descent step size (default 0.1)");
    fit->add_option("--momentum", fit_cmd.momentum, "gradient descent momentum (default 0.9)");
    fit->add_option("--report", fit_cmd.report, "write a loss report JSON");
    fit_cmd.size.add_to(fit);

    EvaluateCmd eval_cmd;
    auto* evaluate = app.add_subcommand("evaluate", "m-RMSE between predicted and reference lighting");
    evaluate->add_option("pred", eval_cmd.pred, "prediction .json or .hdr");
    evaluate->add_option("gt", eval_cmd.gt, "reference .json or .hdr");
    evaluate->add_option("--size", eval_cmd.size, "comparison resolution WxH");
    evaluate->add_option("--manifest", eval_cmd.manifest, "dataset manifest for batch evaluation");
    evaluate->add_option("--predictions", eval_cmd.predictions,
                         "directory with predictions named like the manifest's gt files");
    evaluate->add_flag("--per-channel-median", eval_cmd.per_channel,
                       "use one median ratio per channel");

    GradCheckCmd grad_cmd;
    auto* grad = app.add_subcommand("grad-check", "finite-difference check of the loss gradients");
    grad->add_option("--trials", grad_cmd.trials, "random instances per loss (default 20)");
    grad->add_option("--eps", grad_cmd.eps, "central difference step (default 1e-3)");
    grad->add_option("--seed", grad_cmd.seed, "generator seed (default 1)");
    grad->add_option("--size", grad_cmd.size, "loss resolution WxH (default 128x64)");
    grad->add_option("--tolerance", grad_cmd.tolerance, "failure threshold (default 1e-4)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*project) project_cmd.run();
        else if (*reconstruct_sc) reconstruct_cmd.run();
        else if (*relight_sc) relight_cmd.run();
        else if (*blend) blend_cmd.run();
        else if (*dering_sc) dering_cmd.run();
        else if (*prior) prior_cmd.run();
        else if (*gen) gen_cmd.run();
        else if (*fit) fit_cmd.run();
        else if (*evaluate) eval_cmd.run();
        else if (*grad) return grad_cmd.run();
        return 0;
    } catch (const IoError& e) {
        std::cerr << "sphlight: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "sphlight: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "sphlight: malformed JSON: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "sphlight: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "sphlight: " << e.what() << '\n';
        return 1;
    }
}
