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

#ifndef DIFFRESTORE_CLI_HPP
#define DIFFRESTORE_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <optional>

namespace diffrestore {

/// Exit statuses shared by all subcommands.
enum ExitStatus : int {
    kExitOk = 0,
    kExitConfig = 1,      // usage / configuration problems
    kExitIo = 2,          // missing or unreadable/unwritable files
    kExitDiverged = 3,    // sampling produced non-finite values
};

/// Command-line overrides applied on top of the config document.
struct CliOverrides {
    std::optional<uint64_t> seed;
    std::optional<int> jobs;
    std::optional<int> trace_every;
};

/// Restores every input image: writes <stem>_restored.<ext>, a per-image
/// trace CSV, metrics.json and run.json into the config's output_dir.
int cmd_restore(const std::filesystem::path& config_path, const CliOverrides& overrides = {});

/// Degrades every input with the configured operator: writes
/// <stem>_degraded.<ext> plus suite.json describing operator and seeds.
int cmd_synth(const std::filesystem::path& config_path, const CliOverrides& overrides = {});

/// Runs the dynamic-update grid (fixed/adaptive scale x fixed/learned
/// kernel) plus the kernel-size sweep and writes ablation.csv with suite
/// means.
int cmd_ablate(const std::filesystem::path& config_path, const CliOverrides& overrides = {});

}  // namespace diffrestore

#endif  // DIFFRESTORE_CLI_HPP
