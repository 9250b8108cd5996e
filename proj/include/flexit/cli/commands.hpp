#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "flexit/cli/config.hpp"
#include "flexit/cli/manifest.hpp"
#include "flexit/cli/pipeline.hpp"
#include "flexit/dataset/fixtures.hpp"

namespace flexit {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitNumerical = 4 };

/// Maps an exception to the process exit status.
int exit_code_for(const std::exception& error);

/// Each command writes its artifacts plus manifest.json into one directory
/// and returns the manifest.

/// Writes <stem>.png, <stem>.trajectory.jsonl and <stem>_step<k>.png.
Manifest cmd_edit(const RunConfig& config, const std::filesystem::path& image_path,
                  const std::string& source_text, const std::string& target_text,
                  const std::filesystem::path& out_dir, const std::string& stem = "edit");

/// Writes queries.jsonl (after the config filter).
Manifest cmd_build_queries(const RunConfig& config, const std::filesystem::path& out_dir);

/// FlexIT or a baseline over the query set: outputs/<id>.png, plus
/// trajectories/<id>.jsonl and snapshots/<id>_step<k>.png for FlexIT.
Manifest cmd_run(const RunConfig& config, Method method, const std::filesystem::path& out_dir);

/// Reads <results_dir>/outputs/<id>.png for every query and writes
/// report.json, report.txt and feature dumps under <results_dir>/eval. The
/// table label defaults to the method recorded in <results_dir>/manifest.json.
/// Missing outputs are all listed in one MissingData error.
Manifest cmd_evaluate(const RunConfig& config, const std::filesystem::path& results_dir,
                      const std::string& method_name = "");

/// Writes sweep.csv. Uses the dev split unless the config filters otherwise.
Manifest cmd_sweep(const RunConfig& config, const SweepSpec& spec, const std::filesystem::path& out_dir);

/// Synthetic corpus for the configured registry; writes index.json.
Manifest cmd_fixtures(const RunConfig& config, const FixtureOptions& options,
                      const std::filesystem::path& out_dir);

}  // namespace flexit
