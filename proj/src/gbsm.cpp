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

#include "isac/gbsm.hpp"
#include "isac/random.hpp"

#include <algorithm>
#include <string>

namespace isac
{

std::size_t ClusterSet::ray_count() const
{
    std::size_t n = 0;
    for (const auto& c : clusters)
        n += c.rays.size();
    return n;
}

double ClusterSet::total_power() const
{
    double p = 0.0;
    for (const auto& c : clusters)
        p += c.power;
    return p;
}

void ClusterSet::validate() const
{
    if (clusters.empty())
        throw EmptyChannelError("cluster set has no clusters");
    for (const auto& c : clusters)
    {
        if (c.rays.empty())
            throw ValidationError("cluster with zero rays");
        if (!(c.power >= 0.0) || !std::isfinite(c.power))
            throw ValidationError("cluster power must be finite and non-negative");
        for (const auto& r : c.rays)
        {
            if (!(r.xpr > 0.0))
                throw ValidationError("ray XPR must be positive");
            if (!std::isfinite(r.delay_s) || r.delay_s < 0.0)
                throw ValidationError("ray delay must be finite and non-negative");
            if (r.bounce_order < 0)
                throw ValidationError("negative bounce order");
        }
    }
    if (std::abs(total_power() - 1.0) > 1e-9)
        throw ValidationError("cluster powers must sum to one, got " + std::to_string(total_power()));
}

double ClusterSet::normalize()
{
    const double sum = total_power();
    if (!(sum > 0.0))
        throw EmptyChannelError("cluster set carries no power");
    for (auto& c : clusters)
        c.power /= sum;
    return sum;
}

ClusterSet specular_cluster_set(const std::vector<RaySpec>& rays)
{
    ClusterSet set;
    for (const auto& spec : rays)
    {
        Ray r;
        r.delay_s = spec.delay_s;
        r.aoa = spec.aoa;
        r.aod = spec.aod;
        r.doppler_hz = spec.doppler_hz;
        r.bounce_order = spec.bounce_order;
        set.clusters.push_back({spec.power, {r}});
    }
    if (set.clusters.empty())
        throw EmptyChannelError("specular_cluster_set: no rays");
    set.normalize();
    return set;
}

// ---- antennas -----------------------------------------------------------

AntennaModel AntennaModel::omni()
{
    return {};
}

AntennaModel AntennaModel::horn(double hpbw_deg, double peak_gain_db, Angle3D boresight)
{
    if (!(hpbw_deg > 0.0))
        throw DomainError("horn: half-power beamwidth must be positive");
    AntennaModel a;
    a.kind = Kind::horn;
    a.hpbw_deg = hpbw_deg;
    a.peak_gain_db = peak_gain_db;
    a.boresight = boresight;
    return a;
}

AntennaModel AntennaModel::pointed(const Angle3D& direction) const
{
    AntennaModel a = *this;
    a.boresight = direction;
    return a;
}

FieldPattern AntennaModel::pattern(const Angle3D& direction) const
{
    if (kind == Kind::omni)
        return {cd(1.0, 0.0), cd(0.0, 0.0)};

    constexpr double max_attenuation_db = 30.0;
    const double d_az = wrapped_difference_deg(direction.azimuth_deg(), boresight.azimuth_deg());
    const double d_el = direction.elevation_deg() - boresight.elevation_deg();
    const double a_h = std::min(12.0 * (d_az / hpbw_deg) * (d_az / hpbw_deg), max_attenuation_db);
    const double a_v = std::min(12.0 * (d_el / hpbw_deg) * (d_el / hpbw_deg), max_attenuation_db);
    const double attenuation_db = std::min(a_h + a_v, max_attenuation_db);
    return {cd(std::sqrt(db_to_linear(peak_gain_db - attenuation_db)), 0.0), cd(0.0, 0.0)};
}

// ---- sampling -----------------------------------------------------------

void GenerationProfile::validate() const
{
    if (n_clusters == 0)
        throw EmptyChannelError("generation profile requests zero clusters");
    if (rays_per_cluster == 0)
        throw ValidationError("generation profile requests zero rays per cluster");
    const double spreads[] = {delay_scale_s,      ray_delay_scale_s, angle_spread_rad, ray_angle_spread_rad,
                              elevation_spread_rad, xpr_std_db,       shadowing_std_db, max_doppler_hz};
    for (double s : spreads)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw ValidationError("generation profile spreads must be finite and non-negative");
    if (!(base_delay_s >= 0.0))
        throw ValidationError("base delay must be non-negative");
}

namespace
{

Angle3D perturbed(const Angle3D& center, double az_sigma, double el_sigma, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const double az = center.azimuth + az_sigma * normal(rng);
    const double el = std::clamp(center.elevation + el_sigma * normal(rng), -kPi / 2.0, kPi / 2.0);
    return make_angle(az, el);
}

} // namespace

ClusterSet sample_clusters(const GenerationProfile& profile)
{
    profile.validate();
    Rng rng(profile.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    ClusterSet set;
    set.clusters.reserve(profile.n_clusters);
    for (std::size_t n = 0; n < profile.n_clusters; ++n)
    {
        const bool direct = profile.los && n == 0;
        Cluster cluster;

        double excess = 0.0;
        if (!direct && profile.delay_scale_s > 0.0)
            excess = -profile.delay_scale_s * std::log(1.0 - uniform(rng));
        const double shadow_db = profile.shadowing_std_db * normal(rng);
        const double decay = profile.delay_scale_s > 0.0 ? std::exp(-excess / profile.delay_scale_s) : 1.0;
        cluster.power = decay * db_to_linear(-shadow_db);

        const Angle3D aoa_c = direct ? profile.aoa_center
                                     : perturbed(profile.aoa_center, profile.angle_spread_rad,
                                                 profile.elevation_spread_rad, rng);
        const Angle3D aod_c = direct ? profile.aod_center
                                     : perturbed(profile.aod_center, profile.angle_spread_rad,
                                                 profile.elevation_spread_rad, rng);

        const std::size_t rays = direct ? 1 : profile.rays_per_cluster;
        for (std::size_t m = 0; m < rays; ++m)
        {
            Ray ray;
            ray.delay_s = profile.base_delay_s + excess;
            if (profile.per_ray_delays && !direct && profile.ray_delay_scale_s > 0.0)
                ray.delay_s += -profile.ray_delay_scale_s * std::log(1.0 - uniform(rng));
            ray.aoa = direct ? aoa_c : perturbed(aoa_c, profile.ray_angle_spread_rad, 0.0, rng);
            ray.aod = direct ? aod_c : perturbed(aod_c, profile.ray_angle_spread_rad, 0.0, rng);
            ray.xpr = db_to_linear(profile.xpr_mean_db + profile.xpr_std_db * normal(rng));
            for (double& phase : ray.phases)
                phase = -kPi + 2.0 * kPi * uniform(rng);
            ray.doppler_hz = profile.max_doppler_hz * (2.0 * uniform(rng) - 1.0);
            ray.bounce_order = direct ? 0 : 1;
            cluster.rays.push_back(ray);
        }
        set.clusters.push_back(std::move(cluster));
    }
    set.normalize();
    return set;
}

// ---- coefficients -------------------------------------------------------

cd ray_coefficient(const Ray& ray, double ray_power, const AntennaModel& tx, const AntennaModel& rx,
                   const LinkContext& link)
{
    if (!(link.wavelength_m > 0.0))
        throw DomainError("ray_coefficient: wavelength must be positive");
    if (link.tx_element >= tx.elements.size() || link.rx_element >= rx.elements.size())
        throw ValidationError("ray_coefficient: antenna element index out of range");

    const FieldPattern f_rx = rx.pattern(ray.aoa);
    const FieldPattern f_tx = tx.pattern(ray.aod);
    const cd polarimetric = (f_rx.transpose() * ray.cpm() * f_tx).value();

    const double k = 2.0 * kPi / link.wavelength_m;
    const double array_phase = k * (unit_vector(ray.aoa).dot(rx.elements[link.rx_element]) +
                                    unit_vector(ray.aod).dot(tx.elements[link.tx_element]));
    const double doppler_phase = 2.0 * kPi * ray.doppler_hz * link.time_s;
    return std::sqrt(ray_power) * polarimetric * std::polar(1.0, doppler_phase + array_phase);
}

Cir synthesize_cir(const ClusterSet& clusters, const AntennaModel& tx, const AntennaModel& rx, const LinkContext& link,
                   PathOrigin origin)
{
    if (clusters.clusters.empty())
        throw EmptyChannelError("synthesize_cir: empty cluster set");
    Cir cir;
    cir.t0_s = link.time_s;
    cir.carrier_freq_hz = kSpeedOfLight / link.wavelength_m;
    cir.paths.reserve(clusters.ray_count());
    for (const auto& cluster : clusters.clusters)
    {
        const double ray_power = cluster.ray_power();
        for (const auto& ray : cluster.rays)
        {
            PathComponent p;
            p.delay_s = ray.delay_s;
            p.amp = ray_coefficient(ray, ray_power, tx, rx, link);
            p.doppler_hz = ray.doppler_hz;
            p.aod = ray.aod;
            p.aoa = ray.aoa;
            p.bounce_order = ray.bounce_order;
            p.origin = origin;
            cir.paths.push_back(p);
        }
    }
    cir.sort();
    return cir;
}

void apply_geometric_doppler(ClusterSet& clusters, const Eigen::Vector3d& rx_velocity,
                             const Eigen::Vector3d& scatterer_velocity, double wavelength_m)
{
    if (!(wavelength_m > 0.0))
        throw DomainError("apply_geometric_doppler: wavelength must be positive");
    const Eigen::Vector3d relative = rx_velocity - scatterer_velocity;
    for (auto& c : clusters.clusters)
        for (auto& r : c.rays)
            r.doppler_hz = relative.dot(unit_vector(r.aoa)) / wavelength_m;
}

} // namespace isac
