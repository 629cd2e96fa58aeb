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

#include "isac/core.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace isac
{

double wavelength(double carrier_freq_hz)
{
    if (!(carrier_freq_hz > 0.0))
        throw DomainError("wavelength: carrier frequency must be positive");
    return kSpeedOfLight / carrier_freq_hz;
}

double wrap_two_pi(double rad)
{
    double w = std::fmod(rad, 2.0 * kPi);
    if (w < 0.0)
        w += 2.0 * kPi;
    if (w >= 2.0 * kPi) // fmod rounding at -tiny
        w = 0.0;
    return w;
}

double wrapped_difference_deg(double a_deg, double b_deg)
{
    double d = std::fmod(a_deg - b_deg, 360.0);
    if (d <= -180.0)
        d += 360.0;
    else if (d > 180.0)
        d -= 360.0;
    return d;
}

Angle3D make_angle(double azimuth, double elevation)
{
    if (!std::isfinite(azimuth) || !std::isfinite(elevation))
        throw DomainError("make_angle: non-finite angle");
    constexpr double half_pi = kPi / 2.0;
    if (elevation < -half_pi - 1e-12 || elevation > half_pi + 1e-12)
        throw DomainError("make_angle: elevation outside [-pi/2, pi/2]");
    return {wrap_two_pi(azimuth), std::clamp(elevation, -half_pi, half_pi)};
}

Angle3D Angle3D::from_degrees(double az_deg, double el_deg)
{
    return make_angle(deg_to_rad(az_deg), deg_to_rad(el_deg));
}

Angle3D direction_angle(const Eigen::Vector3d& v)
{
    const double n = v.norm();
    if (!(n > 0.0))
        throw DomainError("direction_angle: zero vector has no direction");
    const double horizontal = std::hypot(v.x(), v.y());
    return make_angle(std::atan2(v.y(), v.x()), std::atan2(v.z(), horizontal));
}

double angular_distance(const Angle3D& a, const Angle3D& b)
{
    // atan2 form stays accurate for nearly parallel vectors
    const Eigen::Vector3d ua = unit_vector(a);
    const Eigen::Vector3d ub = unit_vector(b);
    return std::atan2(ua.cross(ub).norm(), ua.dot(ub));
}

const char* to_string(PathOrigin origin)
{
    switch (origin)
    {
    case PathOrigin::target:
        return "target";
    case PathOrigin::background:
        return "background";
    case PathOrigin::shared:
        return "shared";
    }
    return "background";
}

PathOrigin path_origin_from_string(const std::string& s)
{
    if (s == "target")
        return PathOrigin::target;
    if (s == "background")
        return PathOrigin::background;
    if (s == "shared")
        return PathOrigin::shared;
    throw ValidationError("unknown path origin '" + s + "'");
}

void sort_by_delay(std::vector<PathComponent>& paths)
{
    std::stable_sort(paths.begin(), paths.end(), [](const PathComponent& a, const PathComponent& b) {
        return std::tie(a.delay_s, a.aoa.azimuth, a.aoa.elevation, a.aod.azimuth, a.aod.elevation) <
               std::tie(b.delay_s, b.aoa.azimuth, b.aoa.elevation, b.aod.azimuth, b.aod.elevation);
    });
}

double Cir::total_power() const
{
    return std::accumulate(paths.begin(), paths.end(), 0.0,
                           [](double acc, const PathComponent& p) { return acc + p.power(); });
}

namespace
{

bool mergeable(const PathComponent& a, const PathComponent& b, double delay_tol, double angle_tol)
{
    return std::abs(a.delay_s - b.delay_s) <= delay_tol && angular_distance(a.aoa, b.aoa) <= angle_tol &&
           angular_distance(a.aod, b.aod) <= angle_tol;
}

// One pass of single-linkage grouping. Returns true if anything merged.
bool merge_pass(std::vector<PathComponent>& paths, double delay_tol, double angle_tol)
{
    const std::size_t n = paths.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    };

    // paths are delay-sorted, so the inner scan stops at the delay window
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i + 1; j < n && paths[j].delay_s - paths[i].delay_s <= delay_tol; ++j)
        {
            if (mergeable(paths[i], paths[j], delay_tol, angle_tol))
            {
                const std::size_t ri = find(i), rj = find(j);
                if (ri != rj)
                {
                    parent[std::max(ri, rj)] = std::min(ri, rj);
                    any = true;
                }
            }
        }
    }
    if (!any)
        return false;

    std::vector<PathComponent> merged;
    std::vector<double> strongest;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t r = find(i);
        if (slot[r] == n)
        {
            slot[r] = merged.size();
            merged.push_back(paths[i]);
            strongest.push_back(paths[i].power());
            continue;
        }
        PathComponent& m = merged[slot[r]];
        const cd sum = m.amp + paths[i].amp;
        if (paths[i].power() > strongest[slot[r]])
        {
            strongest[slot[r]] = paths[i].power();
            const PathComponent& strong = paths[i];
            m.delay_s = strong.delay_s;
            m.doppler_hz = strong.doppler_hz;
            m.aod = strong.aod;
            m.aoa = strong.aoa;
        }
        m.amp = sum;
        m.bounce_order = std::min(m.bounce_order, paths[i].bounce_order);
        if (m.origin != paths[i].origin)
            m.origin = PathOrigin::shared;
    }
    paths = std::move(merged);
    sort_by_delay(paths);
    return true;
}

} // namespace

std::vector<PathComponent> merge_paths(std::vector<PathComponent> paths, double delay_tol, double angle_tol)
{
    if (delay_tol < 0.0 || angle_tol < 0.0)
        throw DomainError("merge_paths: tolerances must be non-negative");
    sort_by_delay(paths);
    while (merge_pass(paths, delay_tol, angle_tol))
    {
    }
    return paths;
}

Cir merge_paths(Cir cir, double delay_tol, double angle_tol)
{
    cir.paths = merge_paths(std::move(cir.paths), delay_tol, angle_tol);
    return cir;
}

} // namespace isac
