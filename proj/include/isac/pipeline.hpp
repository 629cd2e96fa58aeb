// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef ISAC_PIPELINE_HPP
#define ISAC_PIPELINE_HPP

#include "isac/scenario.hpp"
#include "isac/sounder.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac
{

/// Name of the environment variable holding the default output root.
inline constexpr const char* kOutputRootEnv = "ISACSIM_OUTPUT_ROOT";

/// $ISACSIM_OUTPUT_ROOT when set and non-empty, otherwise ./runs.
std::filesystem::path default_output_root();

/// An error raised inside one pipeline stage, prefixed with the stage name.
class StageError : public std::runtime_error
{
public:
    StageError(std::string stage, const std::string& what);
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct TargetCounts
{
    std::size_t tx_link_paths = 0;
    std::size_t rx_link_paths = 0;
    std::size_t concatenated_paths = 0; // before any merge
};

/// In-memory result of one simulation.
struct Realization
{
    Cir target;     // omni antennas, unmerged
    Cir background; // omni antennas, PCF applied
    std::vector<TargetCounts> counts;
    LinkBudget budget;
    Padp sensing;            // scanned target + background
    Padp background_scan;    // scanned background alone
    ReconstructionScene scene;
};

Realization simulate(const ScenarioConfig& config);

struct StageTiming
{
    std::string stage;
    double seconds = 0.0;
};

struct FileEntry
{
    std::string name;
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct RunReport
{
    std::filesystem::path run_dir;
    std::uint64_t seed = 0;
    std::vector<StageTiming> timings;
    std::vector<FileEntry> manifest; // deterministic outputs only
};

/// Writes target.json, background.json, padp.csv, padp_background.csv,
/// scene.json, manifest.json (hashes, no timings) and report.json.
RunReport run_simulate(const ScenarioConfig& config, const std::filesystem::path& run_dir);

struct AnalysisResult
{
    std::vector<PathPeak> paths; // target paths with bounce orders
    std::optional<PowerProportion> proportion;
};

/// Extracts target paths from a run directory's PADPs, classifies them
/// against the scene and writes paths.json.
AnalysisResult run_analyze(const std::filesystem::path& run_dir,
                           const std::optional<std::filesystem::path>& scene_path = std::nullopt);

struct ValidationRow
{
    std::string table;
    std::string id;
    std::string quantity;
    double expected = 0.0;
    double computed = 0.0;
    double tolerance = 0.0;
    bool gating = true;
    std::string note;

    double residual() const { return computed - expected; }
    bool passed() const { return std::abs(residual()) <= tolerance + 1e-12; }
};

struct ValidationReport
{
    std::vector<ValidationRow> rows;

    bool passed() const;
};

/// Checks table2.csv, table3.csv and table4.csv in golden_dir.
ValidationReport run_validate(const std::filesystem::path& golden_dir);

struct RoundtripPath
{
    double true_delay_s = 0.0;
    double true_power_db = 0.0;
    std::optional<double> recovered_delay_s;
    std::optional<double> recovered_power_db;
};

struct RoundtripResult
{
    std::vector<RoundtripPath> paths;
    std::size_t recovered_count = 0;
    std::size_t spurious_count = 0;
    std::size_t flagged_bins = 0;
    bool passed = false;
};

/// Sounds the scenario's omni sensing channel (resolved to one path per
/// chip) with the configured PN sounder and compares the re-extracted CIR.
RoundtripResult run_sounder_roundtrip(const ScenarioConfig& config, const std::filesystem::path& run_dir);

} // namespace isac

#endif // ISAC_PIPELINE_HPP
