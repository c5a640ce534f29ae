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

#include "diffrestore/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "diffrestore/errors.hpp"
#include "diffrestore/image_io.hpp"

namespace diffrestore {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& context) {
    if (!j.is_object()) {
        throw ConfigError(context + ": expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (allowed.find(key) == allowed.end()) {
            throw ConfigError(context + ": unknown key \"" + key + "\"");
        }
    }
}

std::string resolve(const std::string& path, const std::filesystem::path& base_dir) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (base_dir / p).lexically_normal().string();
}

TaskOperator operator_from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian_blur") {
        check_keys(j, {"kind", "sigma", "kernel_size"}, "task.gaussian_blur");
        return make_gaussian_blur(j.at("sigma").get<double>(), j.at("kernel_size").get<int>());
    }
    if (kind == "motion_blur") {
        check_keys(j, {"kind", "length", "angle_deg"}, "task.motion_blur");
        return make_motion_blur(j.at("length").get<double>(), j.at("angle_deg").get<double>());
    }
    if (kind == "downsample4x") {
        check_keys(j, {"kind"}, "task.downsample4x");
        return make_downsample4x();
    }
    if (kind == "grayscale") {
        check_keys(j, {"kind"}, "task.grayscale");
        return make_grayscale();
    }
    if (kind == "inpaint") {
        check_keys(j, {"kind", "ratio", "seed", "mask_file"}, "task.inpaint");
        if (j.contains("mask_file")) {
            const std::string path = resolve(j.at("mask_file").get<std::string>(), base_dir);
            TaskOperator op = make_inpaint(load_mask_pgm(path));
            op.mask_file = path;
            return op;
        }
        return make_inpaint(j.at("ratio").get<double>(),
                            j.value("seed", static_cast<uint64_t>(0)));
    }
    if (kind == "low_light") {
        check_keys(j, {"kind", "gain", "bias"}, "task.low_light");
        std::optional<double> bias;
        if (j.contains("bias")) bias = j.at("bias").get<double>();
        return make_low_light(j.at("gain").get<double>(), bias);
    }
    if (kind == "hdr_clip") {
        check_keys(j, {"kind", "threshold"}, "task.hdr_clip");
        return make_hdr_clip(j.at("threshold").get<double>());
    }
    if (kind == "compose") {
        check_keys(j, {"kind", "parts"}, "task.compose");
        std::vector<TaskOperator> parts;
        for (const auto& jp : j.at("parts")) parts.push_back(operator_from_json(jp, base_dir));
        return make_compose(std::move(parts));
    }
    throw ConfigError("task: unknown operator kind \"" + kind + "\"");
}

nlohmann::json operator_to_json(const TaskOperator& op) {
    nlohmann::json j;
    switch (op.kind) {
        case TaskKind::kGaussianBlur:
            j["kind"] = "gaussian_blur";
            j["sigma"] = op.sigma;
            j["kernel_size"] = op.kernel_size;
            break;
        case TaskKind::kMotionBlur:
            j["kind"] = "motion_blur";
            j["length"] = op.length;
            j["angle_deg"] = op.angle_deg;
            break;
        case TaskKind::kDownsample4x:
            j["kind"] = "downsample4x";
            break;
        case TaskKind::kGrayscale:
            j["kind"] = "grayscale";
            break;
        case TaskKind::kInpaint:
            j["kind"] = "inpaint";
            if (!op.mask_file.empty()) {
                j["mask_file"] = op.mask_file;
            } else {
                j["ratio"] = op.ratio;
                j["seed"] = op.seed;
            }
            break;
        case TaskKind::kLowLight:
            j["kind"] = "low_light";
            j["gain"] = op.gain;
            j["bias"] = op.bias;
            break;
        case TaskKind::kHdrClip:
            j["kind"] = "hdr_clip";
            j["threshold"] = op.threshold;
            break;
        case TaskKind::kCompose: {
            j["kind"] = "compose";
            nlohmann::json parts = nlohmann::json::array();
            for (const auto& part : op.parts) parts.push_back(operator_to_json(part));
            j["parts"] = std::move(parts);
            break;
        }
    }
    return j;
}

PriorSpec prior_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    PriorSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    if (spec.kind == "file") {
        check_keys(j, {"kind", "path"}, "prior");
        spec.path = resolve(j.at("path").get<std::string>(), base_dir);
        return spec;
    }
    if (spec.kind == "mixture") {
        check_keys(j, {"kind", "components"}, "prior");
        for (const auto& jc : j.at("components")) {
            check_keys(jc, {"weight", "mean_const", "mean_file", "variance"}, "prior.component");
            PriorComponentSpec c;
            c.weight = jc.at("weight").get<double>();
            c.variance = jc.at("variance").get<double>();
            if (jc.contains("mean_const")) c.mean_const = jc["mean_const"].get<double>();
            if (jc.contains("mean_file")) {
                c.mean_file = resolve(jc["mean_file"].get<std::string>(), base_dir);
            }
            if (c.mean_const.has_value() == c.mean_file.has_value()) {
                throw ConfigError("prior.component: need exactly one of mean_const/mean_file");
            }
            spec.components.push_back(std::move(c));
        }
        if (spec.components.empty()) {
            throw ConfigError("prior: mixture needs at least one component");
        }
        return spec;
    }
    throw ConfigError("prior: unknown kind \"" + spec.kind + "\" (use file|mixture)");
}

nlohmann::json prior_to_json(const PriorSpec& spec) {
    nlohmann::json j;
    j["kind"] = spec.kind;
    if (spec.kind == "file") {
        j["path"] = spec.path;
        return j;
    }
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : spec.components) {
        nlohmann::json jc;
        jc["weight"] = c.weight;
        jc["variance"] = c.variance;
        if (c.mean_const.has_value()) jc["mean_const"] = *c.mean_const;
        if (c.mean_file.has_value()) jc["mean_file"] = *c.mean_file;
        comps.push_back(std::move(jc));
    }
    j["components"] = std::move(comps);
    return j;
}

std::string warm_start_to_string(WarmStart w) {
    switch (w) {
        case WarmStart::kNone: return "none";
        case WarmStart::kFromY: return "from_y";
        case WarmStart::kFromImage: return "from_image";
    }
    return "none";
}

WarmStart warm_start_from_string(const std::string& s) {
    if (s == "none") return WarmStart::kNone;
    if (s == "from_y") return WarmStart::kFromY;
    if (s == "from_image") return WarmStart::kFromImage;
    throw ConfigError("sampler: unknown warm_start \"" + s + "\"");
}

}  // namespace

TaskSpec task_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    TaskSpec task;
    if (j.is_string()) {
        if (j.get<std::string>() != "blind") {
            throw ConfigError("task: string form must be \"blind\"");
        }
        task.blind = true;
        return task;
    }
    if (j.at("kind").get<std::string>() == "blind") {
        check_keys(j, {"kind"}, "task");
        task.blind = true;
        return task;
    }
    task.op = operator_from_json(j, base_dir);
    return task;
}

nlohmann::json task_to_json(const TaskSpec& task) {
    if (task.blind) return nlohmann::json{{"kind", "blind"}};
    return operator_to_json(*task.op);
}

ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir) {
    check_keys(doc,
               {"task", "prior", "sampler", "inputs", "references", "output_dir", "suite_size",
                "report_metrics", "jobs", "kernel_sizes"},
               "config");
    ExperimentConfig config;
    config.task = task_from_json(doc.at("task"), base_dir);
    config.prior = prior_from_json(doc.at("prior"), base_dir);

    const nlohmann::json& js = doc.at("sampler");
    check_keys(js,
               {"steps", "beta_start", "beta_end", "kernel_size", "constraint_mode",
                "kernel_init", "learning_rate", "s_init", "s_min", "s_max", "fixed_scale",
                "fixed_kernel", "warm_start", "warm_image", "seed", "trace_every"},
               "sampler");
    SamplerConfig& s = config.sampler;
    s.steps = js.value("steps", s.steps);
    s.beta_start = js.value("beta_start", s.beta_start);
    s.beta_end = js.value("beta_end", s.beta_end);
    // 5x5 suits blind tasks, 9x9 known-operator inversion
    s.kernel_size = js.value("kernel_size", config.task.blind ? 5 : 9);
    if (js.contains("constraint_mode")) {
        const std::string mode = js["constraint_mode"].get<std::string>();
        if (mode == "unconstrained") {
            s.constraint_mode = ConstraintMode::kUnconstrained;
        } else if (mode == "simplex") {
            s.constraint_mode = ConstraintMode::kSimplex;
        } else {
            throw ConfigError("sampler: unknown constraint_mode \"" + mode + "\"");
        }
    }
    if (js.contains("kernel_init")) {
        const std::string init = js["kernel_init"].get<std::string>();
        if (init == "identity") {
            s.kernel_init = KernelInit::kIdentity;
        } else if (init == "smoothed_identity") {
            s.kernel_init = KernelInit::kSmoothedIdentity;
        } else {
            throw ConfigError("sampler: unknown kernel_init \"" + init + "\"");
        }
    }
    s.learning_rate = js.value("learning_rate", s.learning_rate);
    s.s_init = js.value("s_init", s.s_init);
    s.s_min = js.value("s_min", s.s_min);
    s.s_max = js.value("s_max", s.s_max);
    s.fixed_scale = js.value("fixed_scale", s.fixed_scale);
    s.fixed_kernel = js.value("fixed_kernel", s.fixed_kernel);
    if (js.contains("warm_start")) {
        s.warm_start = warm_start_from_string(js["warm_start"].get<std::string>());
    } else {
        // Blind tasks start from a noised y; known-operator tasks from noise.
        s.warm_start = config.task.blind ? WarmStart::kFromY : WarmStart::kNone;
    }
    if (js.contains("warm_image")) {
        config.warm_image_path = resolve(js["warm_image"].get<std::string>(), base_dir);
    }
    if (s.warm_start == WarmStart::kFromImage && !config.warm_image_path.has_value()) {
        throw ConfigError("sampler: warm_start=from_image needs warm_image");
    }
    s.seed = js.value("seed", s.seed);
    s.trace_every = js.value("trace_every", s.trace_every);
    if (s.trace_every < 1) throw ConfigError("sampler: trace_every must be >= 1");

    if (!doc.contains("inputs") || !doc["inputs"].is_array() || doc["inputs"].empty()) {
        throw ConfigError("config: \"inputs\" must be a non-empty array");
    }
    for (const auto& ji : doc["inputs"]) {
        config.inputs.push_back(resolve(ji.get<std::string>(), base_dir));
    }
    if (doc.contains("references")) {
        for (const auto& jr : doc["references"]) {
            config.references.push_back(resolve(jr.get<std::string>(), base_dir));
        }
        if (config.references.size() != config.inputs.size()) {
            throw ConfigError("config: references must match inputs in length");
        }
    }
    config.output_dir = resolve(doc.at("output_dir").get<std::string>(), base_dir);
    if (doc.contains("suite_size")) {
        config.suite_size = doc["suite_size"].get<int>();
        if (*config.suite_size < 1) throw ConfigError("config: suite_size must be >= 1");
    }
    config.report_metrics = doc.value("report_metrics", true);
    config.jobs = doc.value("jobs", 1);
    if (config.jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (doc.contains("kernel_sizes")) {
        config.kernel_sizes.clear();
        for (const auto& jk : doc["kernel_sizes"]) {
            const int k = jk.get<int>();
            if (k < 1 || k % 2 == 0) {
                throw ConfigError("config: kernel_sizes entries must be odd and positive");
            }
            config.kernel_sizes.push_back(k);
        }
        if (config.kernel_sizes.empty()) {
            throw ConfigError("config: kernel_sizes must not be empty");
        }
    }
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config JSON parse error in " + path.string() + ": " + e.what());
    }
    try {
        return parse_experiment_config(doc, std::filesystem::absolute(path).parent_path());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

nlohmann::json serialize_experiment_config(const ExperimentConfig& config) {
    nlohmann::json doc;
    doc["task"] = task_to_json(config.task);
    doc["prior"] = prior_to_json(config.prior);

    nlohmann::json js;
    const SamplerConfig& s = config.sampler;
    js["steps"] = s.steps;
    js["beta_start"] = s.beta_start;
    js["beta_end"] = s.beta_end;
    js["kernel_size"] = s.kernel_size;
    js["constraint_mode"] =
        s.constraint_mode == ConstraintMode::kSimplex ? "simplex" : "unconstrained";
    js["kernel_init"] =
        s.kernel_init == KernelInit::kSmoothedIdentity ? "smoothed_identity" : "identity";
    js["learning_rate"] = s.learning_rate;
    js["s_init"] = s.s_init;
    js["s_min"] = s.s_min;
    js["s_max"] = s.s_max;
    js["fixed_scale"] = s.fixed_scale;
    js["fixed_kernel"] = s.fixed_kernel;
    js["warm_start"] = warm_start_to_string(s.warm_start);
    if (config.warm_image_path.has_value()) js["warm_image"] = *config.warm_image_path;
    js["seed"] = s.seed;
    js["trace_every"] = s.trace_every;
    doc["sampler"] = std::move(js);

    doc["inputs"] = config.inputs;
    if (!config.references.empty()) doc["references"] = config.references;
    doc["output_dir"] = config.output_dir;
    if (config.suite_size.has_value()) doc["suite_size"] = *config.suite_size;
    doc["report_metrics"] = config.report_metrics;
    doc["jobs"] = config.jobs;
    doc["kernel_sizes"] = config.kernel_sizes;
    return doc;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_experiment_config(a) == serialize_experiment_config(b);
}

std::shared_ptr<NoisePredictor> build_prior(const PriorSpec& spec, int channels, int height,
                                            int width) {
    if (spec.kind == "file") {
        return load_gmm_prior(spec.path, channels, height, width);
    }
    std::vector<GaussianComponent> comps;
    for (const auto& cs : spec.components) {
        GaussianComponent c;
        c.weight = cs.weight;
        c.variance = cs.variance;
        if (cs.mean_const.has_value()) {
            c.mean = ImageTensor(channels, height, width, *cs.mean_const);
        } else {
            c.mean = load_image(*cs.mean_file);
            if (c.mean.channels != channels || c.mean.height != height ||
                c.mean.width != width) {
                throw DimensionError("prior mean image " + *cs.mean_file +
                                     " does not match the input shape");
            }
        }
        comps.push_back(std::move(c));
    }
    return std::make_shared<GaussianMixturePrior>(std::move(comps));
}

}  // namespace diffrestore
