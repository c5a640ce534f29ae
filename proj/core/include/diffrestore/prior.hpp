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

#ifndef DIFFRESTORE_PRIOR_HPP
#define DIFFRESTORE_PRIOR_HPP

#include <filesystem>
#include <memory>
#include <vector>

#include "diffrestore/schedule.hpp"
#include "diffrestore/tensor.hpp"

namespace diffrestore {

/// Noise-prediction contract. Implementations must be deterministic and
/// return a finite tensor of x_t's shape; the sampler is coupled to priors
/// only through this interface.
class NoisePredictor {
public:
    virtual ~NoisePredictor() = default;
    virtual ImageTensor predict(const ImageTensor& x_t, int t,
                                const DiffusionSchedule& sched) const = 0;
};

/// One isotropic Gaussian component over whole images.
struct GaussianComponent {
    double weight = 1.0;
    ImageTensor mean;
    double variance = 1.0;
};

/// Mixture-of-Gaussians image prior with an exact noise predictor.
///
/// For x0 ~ sum_j w_j N(m_j, s_j^2 I) the step-t marginal is the mixture of
/// N(sqrt(ab_t) m_j, (ab_t s_j^2 + 1 - ab_t) I), so the score of p_t is in
/// closed form and eps_hat = -sqrt(1-ab_t) * score. Stands in for a trained
/// denoiser at sizes where one cannot exist.
class GaussianMixturePrior : public NoisePredictor {
public:
    explicit GaussianMixturePrior(std::vector<GaussianComponent> components);

    ImageTensor predict(const ImageTensor& x_t, int t,
                        const DiffusionSchedule& sched) const override;

    const std::vector<GaussianComponent>& components() const { return components_; }

    /// Component responsibilities at (x_t, t), computed with log-sum-exp.
    std::vector<double> responsibilities(const ImageTensor& x_t, int t,
                                         const DiffusionSchedule& sched) const;

private:
    std::vector<GaussianComponent> components_;
};

/// Test double: always predicts the fixed noise tensor, so the Eq.-5 style
/// x0 reconstruction inverts forward_sample exactly.
class OraclePredictor : public NoisePredictor {
public:
    explicit OraclePredictor(ImageTensor eps_true) : eps_(std::move(eps_true)) {}
    ImageTensor predict(const ImageTensor&, int, const DiffusionSchedule&) const override {
        return eps_;
    }

private:
    ImageTensor eps_;
};

/// One-shot clean-image estimate from x_t and the predicted noise:
/// x0_hat = x_t / sqrt(ab_t) - sqrt(1 - ab_t) eps_hat / sqrt(ab_t).
ImageTensor predict_x0(const DiffusionSchedule& sched, const ImageTensor& x_t,
                       const ImageTensor& eps_hat, int t);

/// Loads a mixture prior from JSON:
///   {"components": [{"weight": w, "mean_const": c | "mean_file": path,
///                    "variance": v}, ...]}
/// Constant means are broadcast to channels x height x width; mean files are
/// PNG/PGM images that must match that shape.
std::shared_ptr<GaussianMixturePrior> load_gmm_prior(const std::filesystem::path& json_path,
                                                     int channels, int height, int width);

}  // namespace diffrestore

#endif  // DIFFRESTORE_PRIOR_HPP
