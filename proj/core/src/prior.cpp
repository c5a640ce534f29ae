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

#include "diffrestore/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "diffrestore/errors.hpp"
#include "diffrestore/image_io.hpp"

namespace diffrestore {

GaussianMixturePrior::GaussianMixturePrior(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw ConfigError("GaussianMixturePrior: empty mixture");
    }
    double wsum = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0)) throw ConfigError("GaussianMixturePrior: weights must be positive");
        if (!(c.variance > 0.0)) throw ConfigError("GaussianMixturePrior: variances must be positive");
        if (!c.mean.same_shape(components_.front().mean)) {
            throw DimensionError("GaussianMixturePrior: component means differ in shape");
        }
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12) {
        throw ConfigError("GaussianMixturePrior: weights sum to " + std::to_string(wsum) +
                          ", expected 1");
    }
}

std::vector<double> GaussianMixturePrior::responsibilities(const ImageTensor& x_t, int t,
                                                           const DiffusionSchedule& sched) const {
    const double ab = sched.alpha_bar(t);
    const double sqrt_ab = std::sqrt(ab);
    const size_t n = x_t.size();

    std::vector<double> logp(components_.size());
    for (size_t j = 0; j < components_.size(); ++j) {
        const auto& c = components_[j];
        const double v = ab * c.variance + (1.0 - ab);
        double sq = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double d = x_t.data[i] - sqrt_ab * c.mean.data[i];
            sq += d * d;
        }
        logp[j] = std::log(c.weight) -
                  0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi * v) + sq / v);
    }
    const double m = *std::max_element(logp.begin(), logp.end());
    double z = 0.0;
    for (double& lp : logp) {
        lp = std::exp(lp - m);
        z += lp;
    }
    for (double& lp : logp) lp /= z;
    return logp;
}

ImageTensor GaussianMixturePrior::predict(const ImageTensor& x_t, int t,
                                          const DiffusionSchedule& sched) const {
    if (!x_t.same_shape(components_.front().mean)) {
        throw DimensionError("GaussianMixturePrior: x_t shape differs from component means");
    }
    const double ab = sched.alpha_bar(t);
    const double sqrt_ab = std::sqrt(ab);
    const double sqrt_1mab = std::sqrt(1.0 - ab);

    const std::vector<double> resp = responsibilities(x_t, t, sched);

    ImageTensor eps(x_t.channels, x_t.height, x_t.width, 0.0);
    for (size_t j = 0; j < components_.size(); ++j) {
        const auto& c = components_[j];
        const double v = ab * c.variance + (1.0 - ab);
        const double w = resp[j] / v;
        for (size_t i = 0; i < eps.data.size(); ++i) {
            eps.data[i] += w * (x_t.data[i] - sqrt_ab * c.mean.data[i]);
        }
    }
    for (double& e : eps.data) e *= sqrt_1mab;
    return eps;
}

ImageTensor predict_x0(const DiffusionSchedule& sched, const ImageTensor& x_t,
                       const ImageTensor& eps_hat, int t) {
    if (!x_t.same_shape(eps_hat)) {
        throw DimensionError("predict_x0: x_t and eps_hat shapes differ");
    }
    const double ab = sched.alpha_bar(t);
    const double inv_sqrt_ab = 1.0 / std::sqrt(ab);
    const double coef_eps = std::sqrt(1.0 - ab) * inv_sqrt_ab;
    ImageTensor out = x_t;
    for (size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = x_t.data[i] * inv_sqrt_ab - coef_eps * eps_hat.data[i];
    }
    return out;
}

std::shared_ptr<GaussianMixturePrior> load_gmm_prior(const std::filesystem::path& json_path,
                                                     int channels, int height, int width) {
    std::ifstream in(json_path);
    if (!in) {
        throw IoError("cannot open prior file: " + json_path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("prior JSON parse error in " + json_path.string() + ": " + e.what());
    }
    if (!doc.contains("components") || !doc["components"].is_array()) {
        throw ConfigError("prior JSON: missing \"components\" array");
    }
    std::vector<GaussianComponent> comps;
    for (const auto& jc : doc["components"]) {
        GaussianComponent c;
        c.weight = jc.at("weight").get<double>();
        c.variance = jc.at("variance").get<double>();
        if (jc.contains("mean_const")) {
            c.mean = ImageTensor(channels, height, width, jc["mean_const"].get<double>());
        } else if (jc.contains("mean_file")) {
            const auto mean_path =
                json_path.parent_path() / jc["mean_file"].get<std::string>();
            c.mean = load_image(mean_path);
            if (c.mean.channels != channels || c.mean.height != height || c.mean.width != width) {
                throw DimensionError("prior mean image " + mean_path.string() +
                                     " does not match the restoration shape");
            }
        } else {
            throw ConfigError("prior component needs mean_const or mean_file");
        }
        comps.push_back(std::move(c));
    }
    return std::make_shared<GaussianMixturePrior>(std::move(comps));
}

}  // namespace diffrestore
