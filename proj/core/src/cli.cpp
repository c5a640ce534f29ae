/*
 * Copyright 2026 The diffrestore Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "diffrestore/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffrestore/config.hpp"
#include "diffrestore/errors.hpp"
#include "diffrestore/image_io.hpp"
#include "diffrestore/metrics.hpp"
#include "diffrestore/rng.hpp"
#include "diffrestore/sampler.hpp"

namespace diffrestore {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct LoadedSuite {
    ExperimentConfig config;
    std::vector<RestoreInput> inputs;
    std::vector<std::filesystem::path> input_paths;
};

ExperimentConfig load_with_overrides(const std::filesystem::path& config_path,
                                     const CliOverrides& overrides) {
    ExperimentConfig config = load_experiment_config(config_path);
    if (overrides.seed.has_value()) config.sampler.seed = *overrides.seed;
    if (overrides.jobs.has_value()) {
        if (*overrides.jobs < 1) throw ConfigError("--jobs must be >= 1");
        config.jobs = *overrides.jobs;
    }
    if (overrides.trace_every.has_value()) {
        if (*overrides.trace_every < 1) throw ConfigError("--trace-every must be >= 1");
        config.sampler.trace_every = *overrides.trace_every;
    }
    return config;
}

LoadedSuite load_suite(const std::filesystem::path& config_path, const CliOverrides& overrides) {
    LoadedSuite suite;
    suite.config = load_with_overrides(config_path, overrides);

    size_t n = suite.config.inputs.size();
    if (suite.config.suite_size.has_value()) {
        n = std::min(n, static_cast<size_t>(*suite.config.suite_size));
    }
    for (size_t i = 0; i < n; ++i) {
        RestoreInput input;
        input.name = std::filesystem::path(suite.config.inputs[i]).filename().string();
        input.y = load_image(suite.config.inputs[i]);
        if (!input.y.same_shape(suite.inputs.empty() ? input.y : suite.inputs.front().y)) {
            throw ConfigError("all suite inputs must share one shape; " + input.name +
                              " differs");
        }
        if (!suite.config.references.empty()) {
            input.reference = load_image(suite.config.references[i]);
            if (!input.reference->same_shape(input.y)) {
                throw ConfigError("reference for " + input.name + " has a different shape");
            }
        }
        suite.input_paths.emplace_back(suite.config.inputs[i]);
        suite.inputs.push_back(std::move(input));
    }

    if (suite.config.warm_image_path.has_value()) {
        suite.config.sampler.warm_image = load_image(*suite.config.warm_image_path);
    }
    return suite;
}

void write_trace_csv(const std::filesystem::path& path, const RestorationRun& run) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    const bool with_ref = !run.traces.empty() && run.traces.front().ref_mse.has_value();
    out << "t,loss,s,kernel_mean,mask_mean";
    if (with_ref) out << ",ref_mse";
    out << "\n";
    for (const auto& tr : run.traces) {
        out << tr.t << "," << fmt(tr.loss) << "," << fmt(tr.s) << "," << fmt(tr.kernel_mean)
            << "," << fmt(tr.mask_mean);
        if (with_ref) out << "," << fmt(tr.ref_mse.value_or(0.0));
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json metrics_to_json(const MetricReport& report) {
    nlohmann::json j;
    j["psnr"] = std::isfinite(report.psnr) ? nlohmann::json(report.psnr)
                                           : nlohmann::json("inf");
    j["ssim"] = report.ssim;
    j["loe"] = report.loe;
    if (report.consistency.has_value()) {
        j["consistency"] = *report.consistency;
    } else {
        j["consistency"] = nullptr;
    }
    return j;
}

int run_command(const char* name, const std::function<int()>& body) {
    try {
        return body();
    } catch (const DivergenceError& e) {
        std::cerr << name << ": " << e.what() << "\n";
        return kExitDiverged;
    } catch (const IoError& e) {
        std::cerr << name << ": " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << name << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << "\n";
        return kExitConfig;
    }
}

struct SuiteMeans {
    double psnr = 0.0;
    double ssim = 0.0;
    double loe = 0.0;
    int count = 0;
};

}  // namespace

int cmd_restore(const std::filesystem::path& config_path, const CliOverrides& overrides) {
    return run_command("restore", [&]() -> int {
        LoadedSuite suite = load_suite(config_path, overrides);
        const ExperimentConfig& config = suite.config;
        const ImageTensor& first = suite.inputs.front().y;
        auto prior = build_prior(config.prior, first.channels, first.height, first.width);

        std::filesystem::create_directories(config.output_dir);
        const auto results = restore_batch(suite.inputs, *prior, config.sampler, config.jobs);

        nlohmann::json per_image = nlohmann::json::array();
        SuiteMeans means;
        int exit_code = kExitOk;
        std::string divergence_message;

        for (size_t i = 0; i < results.size(); ++i) {
            const auto& res = results[i];
            const auto& in_path = suite.input_paths[i];
            nlohmann::json entry;
            entry["input"] = in_path.string();
            if (!res.error.empty()) {
                entry["error"] = res.error;
                if (res.diverged_step >= 0) {
                    exit_code = kExitDiverged;
                    divergence_message = "image " + suite.inputs[i].name + ": " + res.error;
                } else if (exit_code == kExitOk) {
                    exit_code = kExitConfig;
                    divergence_message = "image " + suite.inputs[i].name + ": " + res.error;
                }
                per_image.push_back(std::move(entry));
                continue;
            }

            const std::string stem = in_path.stem().string();
            const std::string ext = in_path.extension().string();
            const auto out_dir = std::filesystem::path(config.output_dir);
            const auto restored_path = out_dir / (stem + "_restored" + ext);
            save_image(restored_path, res.run->output);
            write_trace_csv(out_dir / (stem + "_trace.csv"), *res.run);
            save_degradation_model(out_dir / (stem + "_model"), res.run->model);
            entry["restored"] = restored_path.filename().string();

            if (config.report_metrics && suite.inputs[i].reference.has_value()) {
                std::optional<TaskOperator> op;
                std::optional<ImageTensor> y;
                if (!config.task.blind) {
                    op = config.task.op;
                    y = suite.inputs[i].y;
                }
                const MetricReport report =
                    evaluate(res.run->output, *suite.inputs[i].reference, op, y);
                entry["metrics"] = metrics_to_json(report);
                means.psnr += report.psnr;
                means.ssim += report.ssim;
                means.loe += report.loe;
                means.count += 1;
            }
            per_image.push_back(std::move(entry));
        }

        nlohmann::json report;
        report["images"] = std::move(per_image);
        if (means.count > 0) {
            report["suite_mean"] = {{"psnr", means.psnr / means.count},
                                    {"ssim", means.ssim / means.count},
                                    {"loe", means.loe / means.count}};
        }
        write_json(std::filesystem::path(config.output_dir) / "metrics.json", report);

        nlohmann::json meta;
        meta["command"] = "restore";
        meta["config"] = serialize_experiment_config(config);
        meta["noise_stream"] = kNoiseStreamName;
        write_json(std::filesystem::path(config.output_dir) / "run.json", meta);

        if (exit_code != kExitOk) {
            std::cerr << "restore: " << divergence_message << "\n";
        }
        return exit_code;
    });
}

int cmd_synth(const std::filesystem::path& config_path, const CliOverrides& overrides) {
    return run_command("synth", [&]() -> int {
        ExperimentConfig config = load_with_overrides(config_path, overrides);
        if (config.task.blind || !config.task.op.has_value()) {
            throw ConfigError("synth: config.task must name a concrete operator");
        }
        std::filesystem::create_directories(config.output_dir);

        nlohmann::json pairs = nlohmann::json::array();
        size_t n = config.inputs.size();
        if (config.suite_size.has_value()) {
            n = std::min(n, static_cast<size_t>(*config.suite_size));
        }
        for (size_t i = 0; i < n; ++i) {
            const std::filesystem::path in_path(config.inputs[i]);
            const ImageTensor clean = load_image(in_path);
            TaskOperator op = *config.task.op;
            op.seed = config.sampler.seed + static_cast<uint64_t>(i);
            const ImageTensor degraded = degrade(op, clean);
            const auto out_path = std::filesystem::path(config.output_dir) /
                                  (in_path.stem().string() + "_degraded" +
                                   in_path.extension().string());
            save_image(out_path, degraded);
            pairs.push_back({{"clean", in_path.string()},
                             {"degraded", out_path.string()},
                             {"seed", op.seed}});
        }

        nlohmann::json suite;
        suite["task"] = task_to_json(config.task);
        suite["base_seed"] = config.sampler.seed;
        suite["pairs"] = std::move(pairs);
        write_json(std::filesystem::path(config.output_dir) / "suite.json", suite);
        return kExitOk;
    });
}

int cmd_ablate(const std::filesystem::path& config_path, const CliOverrides& overrides) {
    return run_command("ablate", [&]() -> int {
        LoadedSuite suite = load_suite(config_path, overrides);
        const ExperimentConfig& config = suite.config;
        if (config.references.empty()) {
            throw ConfigError("ablate: references are required to score the grid");
        }
        const ImageTensor& first = suite.inputs.front().y;
        auto prior = build_prior(config.prior, first.channels, first.height, first.width);
        std::filesystem::create_directories(config.output_dir);

        struct Variant {
            std::string name;
            bool fixed_kernel;
            bool fixed_scale;
            int kernel_size;
        };
        std::vector<Variant> variants = {
            {"model_a", true, true, config.sampler.kernel_size},
            {"model_b", true, false, config.sampler.kernel_size},
            {"model_c", false, true, config.sampler.kernel_size},
            {"full", false, false, config.sampler.kernel_size},
        };
        for (int k : config.kernel_sizes) {
            variants.push_back({"full_k" + std::to_string(k), false, false, k});
        }

        std::ofstream csv(std::filesystem::path(config.output_dir) / "ablation.csv");
        if (!csv) throw IoError("cannot write ablation.csv");
        csv << "variant,kernel_size,dynamic_kernel,dynamic_scale,mean_psnr,mean_ssim,mean_loe\n";

        for (const auto& variant : variants) {
            SamplerConfig sconfig = config.sampler;
            sconfig.fixed_kernel = variant.fixed_kernel;
            sconfig.fixed_scale = variant.fixed_scale;
            sconfig.kernel_size = variant.kernel_size;

            const auto results = restore_batch(suite.inputs, *prior, sconfig, config.jobs);
            SuiteMeans means;
            for (size_t i = 0; i < results.size(); ++i) {
                if (!results[i].error.empty()) {
                    throw DivergenceError("ablate: image " + suite.inputs[i].name + " (" +
                                              variant.name + "): " + results[i].error,
                                          results[i].diverged_step);
                }
                const MetricReport report =
                    evaluate(results[i].run->output, *suite.inputs[i].reference);
                means.psnr += report.psnr;
                means.ssim += report.ssim;
                means.loe += report.loe;
                means.count += 1;
            }
            csv << variant.name << "," << variant.kernel_size << ","
                << (variant.fixed_kernel ? 0 : 1) << "," << (variant.fixed_scale ? 0 : 1) << ","
                << fmt(means.psnr / means.count) << "," << fmt(means.ssim / means.count) << ","
                << fmt(means.loe / means.count) << "\n";
        }
        if (!csv) throw IoError("write failed: ablation.csv");

        nlohmann::json meta;
        meta["command"] = "ablate";
        meta["config"] = serialize_experiment_config(config);
        meta["noise_stream"] = kNoiseStreamName;
        write_json(std::filesystem::path(config.output_dir) / "run.json", meta);
        return kExitOk;
    });
}

}  // namespace diffrestore
