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

#ifndef DIFFRESTORE_CONFIG_HPP
#define DIFFRESTORE_CONFIG_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffrestore/prior.hpp"
#include "diffrestore/sampler.hpp"
#include "diffrestore/synth.hpp"

namespace diffrestore {

/// Task declaration: either a known operator (linear-inverse style tasks,
/// consistency metric available) or "blind" (operator unknown).
struct TaskSpec {
    bool blind = false;
    std::optional<TaskOperator> op;
};

struct PriorComponentSpec {
    double weight = 1.0;
    std::optional<double> mean_const;
    std::optional<std::string> mean_file;  // resolved against the config dir
    double variance = 1.0;
};

struct PriorSpec {
    std::string kind;                          // "file" or "mixture"
    std::string path;                          // kind == "file"
    std::vector<PriorComponentSpec> components;  // kind == "mixture"
};

/// Whole experiment description parsed from a single JSON document.
/// Unknown keys anywhere in the document are rejected; relative paths are
/// resolved against the config file's directory at parse time.
struct ExperimentConfig {
    TaskSpec task;
    PriorSpec prior;
    SamplerConfig sampler;
    std::optional<std::string> warm_image_path;

    std::vector<std::string> inputs;
    std::vector<std::string> references;  // empty or same length as inputs
    std::string output_dir;
    std::optional<int> suite_size;
    bool report_metrics = true;
    int jobs = 1;
    std::vector<int> kernel_sizes = {1, 3, 5, 7, 9};  // ablation sweep
};

ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json serialize_experiment_config(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Builds the noise predictor named by the prior spec; component means must
/// match channels x height x width.
std::shared_ptr<NoisePredictor> build_prior(const PriorSpec& spec, int channels, int height,
                                            int width);

nlohmann::json task_to_json(const TaskSpec& task);
TaskSpec task_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

}  // namespace diffrestore

#endif  // DIFFRESTORE_CONFIG_HPP
