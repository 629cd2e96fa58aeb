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

#include "isac/background.hpp"
#include "isac/random.hpp"

#include <algorithm>
#include <array>

namespace isac
{

namespace
{

constexpr std::array<PcfReferenceEntry, 14> kPcfTable{{
    {1, PcfCondition::los_los, 0.89},   {2, PcfCondition::los_los, 0.73},   {3, PcfCondition::los_los, 0.67},
    {4, PcfCondition::los_los, 0.75},   {5, PcfCondition::los_los, 0.84},   {6, PcfCondition::los_los, 0.81},
    {7, PcfCondition::los_los, 0.86},   {8, PcfCondition::los_los, 0.78},   {9, PcfCondition::los_los, 0.91},
    {10, PcfCondition::los_los, 0.93},  {11, PcfCondition::los_nlos, 0.89}, {12, PcfCondition::los_nlos, 0.90},
    {13, PcfCondition::los_nlos, 0.92}, {14, PcfCondition::los_nlos, 0.95},
}};

} // namespace

const char* to_string(PcfCondition c)
{
    return c == PcfCondition::los_los ? "los_los" : "los_nlos";
}

PcfCondition pcf_condition_from_string(const std::string& s)
{
    if (s == "los_los")
        return PcfCondition::los_los;
    if (s == "los_nlos")
        return PcfCondition::los_nlos;
    throw ValidationError("unknown PCF condition '" + s + "'");
}

const char* to_string(PcfDomain d)
{
    return d == PcfDomain::linear_power ? "linear_power" : "db_pathloss";
}

PcfDomain pcf_domain_from_string(const std::string& s)
{
    if (s == "linear_power")
        return PcfDomain::linear_power;
    if (s == "db_pathloss")
        return PcfDomain::db_pathloss;
    throw ValidationError("unknown pcf_domain '" + s + "'");
}

std::span<const PcfReferenceEntry> pcf_reference_table()
{
    return kPcfTable;
}

PcfModel PcfModel::defaults(PcfCondition condition)
{
    // sample mean and (n-1) standard deviation of the reference table
    if (condition == PcfCondition::los_los)
        return {condition, 0.817, 0.0844656406146573};
    return {condition, 0.915, 0.02645751311064588};
}

PcfModel PcfModel::fixed(double o_back, PcfCondition condition)
{
    return {condition, o_back, 0.0};
}

void PcfModel::validate() const
{
    if (!(stddev >= 0.0) || !std::isfinite(stddev) || !std::isfinite(mean))
        throw ValidationError("PCF model: mean must be finite and stddev non-negative");
    if (!(clamp_min > 0.0) || !(clamp_max >= clamp_min))
        throw ValidationError("PCF model: clamp range must satisfy 0 < min <= max");
}

double sample_pcf(const PcfModel& model, std::uint64_t seed)
{
    return sample_pcf(model, seed, 1).front();
}

std::vector<double> sample_pcf(const PcfModel& model, std::uint64_t seed, std::size_t count)
{
    model.validate();
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(count);
    for (double& v : out)
    {
        const double draw = model.stddev == 0.0 ? model.mean : model.mean + model.stddev * normal(rng);
        v = std::clamp(draw, model.clamp_min, model.clamp_max);
    }
    return out;
}

double apply_pcf(double background_power_linear, double o_back, PcfDomain domain)
{
    if (domain == PcfDomain::linear_power)
        return o_back * background_power_linear;
    if (!(background_power_linear > 0.0))
        return 0.0;
    return std::pow(background_power_linear, o_back);
}

Cir apply_pcf(Cir background, double o_back, PcfDomain domain)
{
    const double total = background.total_power();
    if (!(total > 0.0))
        return background;
    const double scale = std::sqrt(apply_pcf(total, o_back, domain) / total);
    for (auto& p : background.paths)
        p.amp *= scale;
    return background;
}

Cir background_bistatic(const GenerationProfile& profile, const AntennaModel& tx, const AntennaModel& rx,
                        const LinkContext& link)
{
    return synthesize_cir(sample_clusters(profile), tx, rx, link, PathOrigin::background);
}

Cir background_monostatic(std::span<const GeometricScatterer> scatterers, const Eigen::Vector3d& txrx_position,
                          double wavelength_m)
{
    if (!(wavelength_m > 0.0))
        throw DomainError("background_monostatic: wavelength must be positive");
    Cir cir;
    cir.carrier_freq_hz = kSpeedOfLight / wavelength_m;
    for (const auto& s : scatterers)
    {
        const Eigen::Vector3d v = s.position - txrx_position;
        const double range = v.norm();
        if (!(range > 1e-9))
            throw ValidationError("background_monostatic: scatterer '" + s.label + "' coincides with the Tx/Rx");
        const Angle3D dir = direction_angle(v);
        const double one_way = wavelength_m / (4.0 * kPi * range);
        const double power = one_way * one_way * one_way * one_way * db_to_linear(s.reflection_gain_db);

        PathComponent p;
        p.delay_s = 2.0 * range / kSpeedOfLight;
        p.amp = std::polar(std::sqrt(power), -2.0 * kPi * 2.0 * range / wavelength_m);
        p.aod = dir;
        p.aoa = dir;
        p.bounce_order = 1;
        p.origin = PathOrigin::background;
        cir.paths.push_back(p);
    }
    cir.sort();
    return cir;
}

Cir background_geometric_bistatic(std::span<const GeometricScatterer> scatterers, const Eigen::Vector3d& tx_position,
                                  const Eigen::Vector3d& rx_position, double wavelength_m, bool include_los)
{
    if (!(wavelength_m > 0.0))
        throw DomainError("background_geometric_bistatic: wavelength must be positive");
    const auto free_space = [wavelength_m](double d) { return std::pow(wavelength_m / (4.0 * kPi * d), 2); };
    Cir cir;
    cir.carrier_freq_hz = kSpeedOfLight / wavelength_m;
    if (include_los)
    {
        const Eigen::Vector3d v = rx_position - tx_position;
        const double d = v.norm();
        if (!(d > 1e-9))
            throw ValidationError("background_geometric_bistatic: Tx and Rx coincide");
        PathComponent p;
        p.delay_s = d / kSpeedOfLight;
        p.amp = std::polar(std::sqrt(free_space(d)), -2.0 * kPi * d / wavelength_m);
        p.aod = direction_angle(v);
        p.aoa = direction_angle(-v);
        p.bounce_order = 0;
        p.origin = PathOrigin::background;
        cir.paths.push_back(p);
    }
    for (const auto& s : scatterers)
    {
        const Eigen::Vector3d out = s.position - tx_position;
        const Eigen::Vector3d back = s.position - rx_position;
        const double d1 = out.norm();
        const double d2 = back.norm();
        if (!(d1 > 1e-9) || !(d2 > 1e-9))
            throw ValidationError("background_geometric_bistatic: scatterer '" + s.label + "' coincides with a node");
        PathComponent p;
        p.delay_s = (d1 + d2) / kSpeedOfLight;
        p.amp = std::polar(std::sqrt(free_space(d1) * free_space(d2) * db_to_linear(s.reflection_gain_db)),
                           -2.0 * kPi * (d1 + d2) / wavelength_m);
        p.aod = direction_angle(out);
        p.aoa = direction_angle(back);
        p.bounce_order = 1;
        p.origin = PathOrigin::background;
        cir.paths.push_back(p);
    }
    cir.sort();
    return cir;
}

} // namespace isac
