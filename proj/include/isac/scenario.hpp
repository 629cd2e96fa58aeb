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

#ifndef ISAC_SCENARIO_HPP
#define ISAC_SCENARIO_HPP

#include "isac/analysis.hpp"
#include "isac/link_budget.hpp"
#include "isac/target.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac
{

enum class SensingMode
{
    mono_static,
    bi_static
};

struct NodeConfig
{
    Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
    AntennaModel antenna = AntennaModel::omni();
};

/// How a target sub-link is generated. Statistical links sample clusters
/// around the geometric direction; geometric links hold the direct ray plus
/// one specular ray per background scatterer.
struct SubLinkConfig
{
    enum class Mode
    {
        statistical,
        geometric
    };
    Mode mode = Mode::statistical;
    GenerationProfile profile; // centres, base delay and seed are filled in from geometry
};

struct TargetConfig
{
    Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
    Eigen::Vector3d velocity_mps = Eigen::Vector3d::Zero();
    RcsModel rcs = RcsConstant{};
    PolarimetricAmplitude cpm = PolarimetricAmplitude::Identity();
    SubLinkConfig tx_link;
    SubLinkConfig rx_link;
};

struct BackgroundConfig
{
    enum class Mode
    {
        statistical,
        geometric
    };
    Mode mode = Mode::statistical;
    GenerationProfile profile;
    std::vector<GeometricScatterer> scatterers;
    bool include_los = true; // bi-static geometric only
};

struct ScanConfig
{
    double start_deg = 0.0;
    double stop_deg = 360.0;
    double step_deg = 5.0;
    ReconstructionScene::ScanSide side = ReconstructionScene::ScanSide::rx;
};

struct SounderConfig
{
    int m = 11;
    double snr_db = 30.0;
    std::size_t samples_per_chip = 1;
    double threshold_db = 30.0;
};

struct ScenarioConfig
{
    std::string name;
    double carrier_freq_hz = 0.0;
    double bandwidth_hz = 0.0;
    SensingMode sensing_mode = SensingMode::bi_static;
    NodeConfig tx;
    NodeConfig rx;
    std::vector<TargetConfig> targets;
    BackgroundConfig background;
    PcfModel pcf;
    PcfDomain pcf_domain = PcfDomain::linear_power;
    PathLossModel path_loss;
    ScanConfig scan;
    SounderConfig sounder;
    std::uint64_t seed = 0;
    double time_s = 0.0;
    std::string outputs; // run directory, relative to the output root

    double wavelength_m() const { return wavelength(carrier_freq_hz); }
};

/// Carries every violation found, not only the first.
class ConfigError : public ValidationError
{
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& json_text);

/// Returns the list of violations; empty when the config is valid.
std::vector<std::string> check_config(const ScenarioConfig& config);

const char* to_string(SensingMode mode);

} // namespace isac

#endif // ISAC_SCENARIO_HPP
