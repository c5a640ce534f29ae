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

#include <string>

#include <CLI11.hpp>

#include "diffrestore/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Blind image restoration via guided diffusion sampling"};
    app.require_subcommand(1);

    std::string config_path;
    diffrestore::CliOverrides overrides;
    uint64_t seed = 0;
    int jobs = 0;
    int trace_every = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Experiment config (JSON)")
            ->required();
        cmd->add_option("--jobs", jobs, "Parallel restorations")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "Overrides the config seed");
        cmd->add_option("--trace-every", trace_every, "Trace row stride")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* restore = app.add_subcommand("restore", "Restore degraded images");
    CLI::App* synth = app.add_subcommand("synth", "Fabricate a degraded test suite");
    CLI::App* ablate = app.add_subcommand("ablate", "Dynamic-update grid and kernel sweep");
    add_common(restore);
    add_common(synth);
    add_common(ablate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : diffrestore::kExitConfig;
    }

    auto* cmd = app.get_subcommands().front();
    if (cmd->count("--seed") > 0) overrides.seed = seed;
    if (cmd->count("--jobs") > 0) overrides.jobs = jobs;
    if (cmd->count("--trace-every") > 0) overrides.trace_every = trace_every;

    if (cmd == restore) return diffrestore::cmd_restore(config_path, overrides);
    if (cmd == synth) return diffrestore::cmd_synth(config_path, overrides);
    return diffrestore::cmd_ablate(config_path, overrides);
}
