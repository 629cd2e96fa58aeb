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

#ifndef ISAC_BACKGROUND_HPP
#define ISAC_BACKGROUND_HPP

#include "isac/gbsm.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace isac
{

enum class PcfCondition
{
    los_los,
    los_nlos
};

const char* to_string(PcfCondition c);
PcfCondition pcf_condition_from_string(const std::string& s);

/// Power Control Factor O_back ~ Normal(mean, stddev), clamped to
/// [clamp_min, clamp_max].
struct PcfModel
{
    PcfCondition condition = PcfCondition::los_los;
    double mean = 1.0;
    double stddev = 0.0;
    double clamp_min = 1e-6;
    double clamp_max = 1.5;

    /// Sample statistics of the measured human-target PCF positions.
    static PcfModel defaults(PcfCondition condition);
    static PcfModel fixed(double o_back, PcfCondition condition = PcfCondition::los_los);
    void validate() const;
};

struct PcfReferenceEntry
{
    int position;
    PcfCondition condition;
    double o_back;
};

/// The fourteen measured PCF values the defaults are derived from.
std::span<const PcfReferenceEntry> pcf_reference_table();

double sample_pcf(const PcfModel& model, std::uint64_t seed);
std::vector<double> sample_pcf(const PcfModel& model, std::uint64_t seed, std::size_t count);

enum class PcfDomain
{
    linear_power, // P -> O * P
    db_pathloss   // PL_dB -> O * PL_dB, i.e. P -> P^O
};

const char* to_string(PcfDomain d);
PcfDomain pcf_domain_from_string(const std::string& s);

double apply_pcf(double background_power_linear, double o_back, PcfDomain domain = PcfDomain::linear_power);

/// Scales every background path so its power follows apply_pcf. In the
/// db_pathloss domain the exponent acts on the total background gain.
Cir apply_pcf(Cir background, double o_back, PcfDomain domain = PcfDomain::linear_power);

struct GeometricScatterer
{
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double reflection_gain_db = 0.0;
    std::string label;
};

/// Statistical bi-static background: the communication-channel generator
/// with every path tagged as background.
Cir background_bistatic(const GenerationProfile& profile, const AntennaModel& tx, const AntennaModel& rx,
                        const LinkContext& link);

/// Mono-static background from explicit scatterers around a co-located
/// Tx/Rx: one path per scatterer with delay 2R/c, AoA = AoD pointing at the
/// scatterer and power (lambda / 4 pi R)^4 times the reflection gain.
Cir background_monostatic(std::span<const GeometricScatterer> scatterers, const Eigen::Vector3d& txrx_position,
                          double wavelength_m);

/// Bi-static background from explicit point scatterers: one single-bounce
/// path per scatterer with power (lambda / 4 pi d1)^2 (lambda / 4 pi d2)^2
/// times the reflection gain, plus the direct Tx-Rx path when requested.
Cir background_geometric_bistatic(std::span<const GeometricScatterer> scatterers, const Eigen::Vector3d& tx_position,
                                  const Eigen::Vector3d& rx_position, double wavelength_m, bool include_los = true);

} // namespace isac

#endif // ISAC_BACKGROUND_HPP
