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

#ifndef ISAC_GBSM_HPP
#define ISAC_GBSM_HPP

#include "isac/core.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace isac
{

class EmptyChannelError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

/// Cross-polarization matrix of one ray. Phases are ordered
/// (theta-theta, theta-phi, phi-theta, phi-phi). An infinite XPR gives the
/// pure co-polar (diagonal) matrix.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 2, 2> cpm(Scalar xpr, const std::array<Scalar, 4>& phases)
{
    using std::exp;
    using std::sqrt;
    if (!(xpr > Scalar(0)))
        throw DomainError("cpm: XPR must be positive");
    using C = std::complex<Scalar>;
    const Scalar cross = sqrt(Scalar(1) / xpr);
    const C j(0, 1);
    Eigen::Matrix<C, 2, 2> m;
    m << exp(j * phases[0]), cross * exp(j * phases[1]), cross * exp(j * phases[2]), exp(j * phases[3]);
    return m;
}

struct Ray
{
    double delay_s = 0.0;
    Angle3D aoa;
    Angle3D aod;
    double xpr = std::numeric_limits<double>::infinity(); // linear
    std::array<double, 4> phases{};                        // radians
    double doppler_hz = 0.0;
    int bounce_order = 1;

    PolarimetricAmplitude cpm() const { return isac::cpm(xpr, phases); }
};

struct Cluster
{
    double power = 0.0; // P_n, linear
    std::vector<Ray> rays;

    double ray_power() const { return power / static_cast<double>(rays.size()); }
};

/// Statistical clusters of one link. Cluster powers sum to one before any
/// path loss is applied.
struct ClusterSet
{
    std::vector<Cluster> clusters;

    std::size_t ray_count() const;
    double total_power() const;
    /// Throws ValidationError if an invariant is broken.
    void validate() const;
    /// Rescales cluster powers to sum to one; returns the previous sum.
    double normalize();
};

/// Deterministic single-ray cluster, e.g. a geometric LOS or specular path.
struct RaySpec
{
    double delay_s = 0.0;
    double power = 1.0; // relative, linear
    Angle3D aoa;
    Angle3D aod;
    int bounce_order = 0;
    double doppler_hz = 0.0;
};

/// One single-ray cluster per spec with identity polarization, normalized.
ClusterSet specular_cluster_set(const std::vector<RaySpec>& rays);

struct AntennaModel
{
    enum class Kind
    {
        omni,
        horn
    };

    Kind kind = Kind::omni;
    double hpbw_deg = 0.0;
    double peak_gain_db = 0.0;
    Angle3D boresight;
    std::vector<Eigen::Vector3d> elements{Eigen::Vector3d::Zero()}; // local positions, m

    static AntennaModel omni();
    static AntennaModel horn(double hpbw_deg, double peak_gain_db, Angle3D boresight = {});

    /// Copy with the boresight turned to `direction` (turntable rotation).
    AntennaModel pointed(const Angle3D& direction) const;

    /// Vertically polarized field pattern. Omni is (1, 0) everywhere; the horn
    /// uses the parabolic 3 dB beam with a 30 dB floor, so |F|^2 at
    /// boresight is the linear peak gain.
    FieldPattern pattern(const Angle3D& direction) const;
    double power_gain(const Angle3D& direction) const { return pattern(direction).squaredNorm(); }
};

/// Cluster sampling profile. Distributions: exponential cluster delays,
/// wrapped-Gaussian azimuths, Gaussian elevations, log-normal cluster
/// shadowing, normal XPR in dB, uniform initial phases and Doppler.
struct GenerationProfile
{
    std::size_t n_clusters = 8;
    std::size_t rays_per_cluster = 10;
    double base_delay_s = 0.0;      // added to every delay (e.g. d/c of the link)
    double delay_scale_s = 30e-9;   // mean excess cluster delay
    bool per_ray_delays = false;    // off: all rays of a cluster share tau_n
    double ray_delay_scale_s = 0.0; // exponential intra-cluster offsets when enabled
    Angle3D aoa_center;
    Angle3D aod_center;
    double angle_spread_rad = deg_to_rad(20.0);
    double ray_angle_spread_rad = deg_to_rad(2.0);
    double elevation_spread_rad = deg_to_rad(5.0);
    double xpr_mean_db = 9.0;
    double xpr_std_db = 3.0;
    double shadowing_std_db = 3.0;
    double max_doppler_hz = 0.0;
    bool los = false; // first cluster is a single direct ray at the centers
    std::uint64_t seed = 1;

    void validate() const;
};

ClusterSet sample_clusters(const GenerationProfile& profile);

/// Element indices, observation time and wavelength for one coefficient.
struct LinkContext
{
    std::size_t tx_element = 0;
    std::size_t rx_element = 0;
    double time_s = 0.0;
    double wavelength_m = 0.0;
};

/// Coefficient of one ray: sqrt(ray_power) F_rx^T CPM F_tx times the Doppler
/// and array phase terms.
cd ray_coefficient(const Ray& ray, double ray_power, const AntennaModel& tx, const AntennaModel& rx,
                   const LinkContext& link);

/// One path per (cluster, ray), sorted by delay, not merged.
Cir synthesize_cir(const ClusterSet& clusters, const AntennaModel& tx, const AntennaModel& rx, const LinkContext& link,
                   PathOrigin origin = PathOrigin::background);

/// Sets every ray's Doppler to (v_rx - v_scatterer) . r_aoa / lambda.
void apply_geometric_doppler(ClusterSet& clusters, const Eigen::Vector3d& rx_velocity,
                             const Eigen::Vector3d& scatterer_velocity, double wavelength_m);

} // namespace isac

#endif // ISAC_GBSM_HPP
