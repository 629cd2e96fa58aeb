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

#ifndef ISAC_CORE_HPP
#define ISAC_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac
{

inline constexpr double kSpeedOfLight = 2.99792458e8; // m/s, exact
inline constexpr double kPi = std::numbers::pi;

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// Raised when structured input (profiles, configs, grids) is inconsistent.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

using cd = std::complex<double>;
using PolarimetricAmplitude = Eigen::Matrix2cd; // (theta, phi) basis
using FieldPattern = Eigen::Vector2cd;          // (F^theta, F^phi)

// ---- scalar conversions -------------------------------------------------

template <typename Scalar>
Scalar db_to_linear(Scalar db)
{
    using std::pow;
    return pow(Scalar(10), db / Scalar(10));
}

template <typename Scalar>
Scalar linear_to_db(Scalar x)
{
    using std::log10;
    if (!(x > Scalar(0)))
        throw DomainError("linear_to_db: input must be positive");
    return Scalar(10) * log10(x);
}

template <typename Scalar>
Scalar deg_to_rad(Scalar deg)
{
    return deg * Scalar(kPi) / Scalar(180);
}

template <typename Scalar>
Scalar rad_to_deg(Scalar rad)
{
    return rad * Scalar(180) / Scalar(kPi);
}

/// Carrier wavelength c/f.
double wavelength(double carrier_freq_hz);

/// 10 log10(lambda^2 / 4 pi). The single definition used by the radar
/// equation and by target-channel concatenation.
template <typename Scalar>
Scalar spreading_term_db(Scalar lambda)
{
    return linear_to_db(lambda * lambda / (Scalar(4) * Scalar(kPi)));
}

/// Linear form of the concatenation gain 4 pi / lambda^2 (inverse of the
/// spreading term).
template <typename Scalar>
Scalar concatenation_gain_linear(Scalar lambda)
{
    return db_to_linear(-spreading_term_db(lambda));
}

// ---- angles -------------------------------------------------------------

/// Direction in spherical coordinates. Azimuth counterclockwise from +x in
/// the horizontal plane, elevation measured up from the horizontal.
struct Angle3D
{
    double azimuth = 0.0;   // [0, 2 pi)
    double elevation = 0.0; // [-pi/2, pi/2]

    static Angle3D from_degrees(double az_deg, double el_deg = 0.0);
    double azimuth_deg() const { return rad_to_deg(azimuth); }
    double elevation_deg() const { return rad_to_deg(elevation); }
};

/// Builds an Angle3D, wrapping azimuth into [0, 2 pi). Elevation outside
/// [-pi/2, pi/2] is a DomainError.
Angle3D make_angle(double azimuth, double elevation);

double wrap_two_pi(double rad);

/// Signed difference a - b wrapped into (-180, 180].
double wrapped_difference_deg(double a_deg, double b_deg);

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> unit_vector(Scalar azimuth, Scalar elevation)
{
    using std::cos;
    using std::sin;
    const Scalar ce = cos(elevation);
    return {ce * cos(azimuth), ce * sin(azimuth), sin(elevation)};
}

inline Eigen::Vector3d unit_vector(const Angle3D& angle)
{
    return unit_vector(angle.azimuth, angle.elevation);
}

/// Inverse of unit_vector for any nonzero vector.
Angle3D direction_angle(const Eigen::Vector3d& v);

/// Great-circle angle between two directions, radians.
double angular_distance(const Angle3D& a, const Angle3D& b);

// ---- paths and CIRs -----------------------------------------------------

enum class PathOrigin
{
    target,
    background,
    shared
};

const char* to_string(PathOrigin origin);
PathOrigin path_origin_from_string(const std::string& s);

/// One resolvable multipath component after antenna projection.
struct PathComponent
{
    double delay_s = 0.0;
    cd amp{0.0, 0.0};
    double doppler_hz = 0.0;
    Angle3D aod;
    Angle3D aoa;
    int bounce_order = 0; // 0 = direct
    PathOrigin origin = PathOrigin::background;

    double power() const { return std::norm(amp); }
};

/// Orders paths by delay, then by angles so the ordering is total.
void sort_by_delay(std::vector<PathComponent>& paths);

struct Cir
{
    std::vector<PathComponent> paths; // ascending delay
    double t0_s = 0.0;
    double carrier_freq_hz = 0.0;

    double total_power() const;
    void sort() { sort_by_delay(paths); }
};

/// Coherently combines paths closer than delay_tol in delay and angle_tol in
/// both AoA and AoD (single linkage, iterated to a fixed point). A merged
/// path carries the summed amplitude and the geometry of its strongest
/// member. Output is sorted by delay; the operation is idempotent.
std::vector<PathComponent> merge_paths(std::vector<PathComponent> paths, double delay_tol, double angle_tol);

Cir merge_paths(Cir cir, double delay_tol, double angle_tol);

/// Default merge tolerances: one delay bin and half a 5 degree scan step.
struct MergeTolerance
{
    double delay_s;
    double angle_rad = deg_to_rad(2.5);

    static MergeTolerance for_bandwidth(double bandwidth_hz) { return {1.0 / bandwidth_hz}; }
};

/// Large-scale bookkeeping of one sensing realization.
struct LinkBudget
{
    std::vector<double> pl_tar_db; // per scattering point
    double pl_back_db = 0.0;
    double o_back = 1.0;
    double wavelength_m = 0.0;
};

} // namespace isac

#endif // ISAC_CORE_HPP
