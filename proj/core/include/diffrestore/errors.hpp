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

#ifndef DIFFRESTORE_ERRORS_HPP
#define DIFFRESTORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace diffrestore {

/// Shape or channel-count mismatch between tensors/kernels.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value (bad schedule range, even kernel size, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Diffusion step index outside [1, T].
class StepError : public std::runtime_error {
public:
    explicit StepError(const std::string& what) : std::runtime_error(what) {}
};

/// Guidance-scale update asked to divide by a non-positive loss.
class GuidanceError : public std::runtime_error {
public:
    explicit GuidanceError(const std::string& what) : std::runtime_error(what) {}
};

/// Metric preconditions not met (image smaller than the SSIM window, ...).
class MetricError : public std::runtime_error {
public:
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read/written or has an unsupported format.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values appeared during sampling; carries the step index.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int step)
        : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

}  // namespace diffrestore

#endif  // DIFFRESTORE_ERRORS_HPP
