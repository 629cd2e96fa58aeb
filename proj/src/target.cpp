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

#include "isac/target.hpp"

namespace isac
{

void apply_target_motion(SubLink& link, const Eigen::Vector3d& velocity, double wavelength_m)
{
    if (!(wavelength_m > 0.0))
        throw DomainError("apply_target_motion: wavelength must be positive");
    for (auto& c : link.clusters.clusters)
        for (auto& r : c.rays)
        {
            const Angle3D& at_target = link.side == SubLinkSide::tx_to_target ? r.aoa : r.aod;
            r.doppler_hz = velocity.dot(unit_vector(at_target)) / wavelength_m;
        }
}

Cir concatenate(const SubLink& a, const SubLink& b, const ScatteringPoint& sp, const AntennaModel& tx,
                const AntennaModel& rx, const LinkContext& link)
{
    if (a.side != SubLinkSide::tx_to_target || b.side != SubLinkSide::target_to_rx)
        throw ValidationError("concatenate: expects (tx_to_target, target_to_rx) sub-links");
    if (a.clusters.ray_count() == 0 || b.clusters.ray_count() == 0)
        throw EmptyChannelError("concatenate: empty sub-link");
    if (!(link.wavelength_m > 0.0))
        throw DomainError("concatenate: wavelength must be positive");
    if (link.tx_element >= tx.elements.size() || link.rx_element >= rx.elements.size())
        throw ValidationError("concatenate: antenna element index out of range");

    const double k = 2.0 * kPi / link.wavelength_m;
    const double gain = std::sqrt(concatenation_gain_linear(link.wavelength_m));
    const Eigen::Vector3d& d_tx = tx.elements[link.tx_element];
    const Eigen::Vector3d& d_rx = rx.elements[link.rx_element];

    // Tx-side half: CPM_1 F_tx with its phase, per ray of a
    struct Half
    {
        const Ray* ray;
        double amp;
        Eigen::Vector2cd field;
        double phase;
    };
    std::vector<Half> tx_side;
    tx_side.reserve(a.clusters.ray_count());
    for (const auto& c : a.clusters.clusters)
        for (const auto& r : c.rays)
        {
            const double phase = k * (unit_vector(r.aoa).dot(sp.position) + unit_vector(r.aod).dot(d_tx)) +
                                 2.0 * kPi * r.doppler_hz * link.time_s;
            tx_side.push_back({&r, std::sqrt(c.ray_power()), r.cpm() * tx.pattern(r.aod), phase});
        }

    Cir cir;
    cir.t0_s = link.time_s;
    cir.carrier_freq_hz = kSpeedOfLight / link.wavelength_m;
    cir.paths.reserve(tx_side.size() * b.clusters.ray_count());
    for (const auto& c : b.clusters.clusters)
        for (const auto& r2 : c.rays)
        {
            // F_rx^T CPM_2 CPM_k as a row vector
            const Eigen::RowVector2cd rx_row = rx.pattern(r2.aoa).transpose() * r2.cpm() * sp.cpm;
            const double amp2 = std::sqrt(c.ray_power());
            const double phase2 = k * (unit_vector(r2.aoa).dot(d_rx) + unit_vector(r2.aod).dot(sp.position)) +
                                  2.0 * kPi * r2.doppler_hz * link.time_s;
            for (const auto& h : tx_side)
            {
                const double sigma = rcs_eval(sp.rcs, h.ray->aoa, r2.aod);
                const cd polarimetric = (rx_row * h.field).value();
                PathComponent p;
                p.delay_s = h.ray->delay_s + r2.delay_s;
                p.doppler_hz = h.ray->doppler_hz + r2.doppler_hz;
                p.aod = h.ray->aod;
                p.aoa = r2.aoa;
                p.bounce_order = h.ray->bounce_order + r2.bounce_order;
                p.origin = PathOrigin::target;
                p.amp = h.amp * amp2 * std::sqrt(sigma) * gain * polarimetric * std::polar(1.0, h.phase + phase2);
                cir.paths.push_back(p);
            }
        }
    cir.sort();
    return cir;
}

Cir multi_point_target(std::span<const TargetPoint> points, const AntennaModel& tx, const AntennaModel& rx,
                       const LinkContext& link)
{
    if (points.empty())
        throw EmptyChannelError("multi_point_target: no scattering points");
    Cir out;
    out.t0_s = link.time_s;
    out.carrier_freq_hz = kSpeedOfLight / link.wavelength_m;
    for (const auto& tp : points)
    {
        if (!(tp.pl_gain_linear >= 0.0) || !std::isfinite(tp.pl_gain_linear))
            throw DomainError("multi_point_target: path-loss gain must be finite and non-negative");
        Cir one = concatenate(tp.tx_link, tp.rx_link, tp.point, tx, rx, link);
        const double scale = std::sqrt(tp.pl_gain_linear);
        for (auto& p : one.paths)
        {
            p.amp *= scale;
            out.paths.push_back(p);
        }
    }
    out.paths = merge_paths(std::move(out.paths), 0.0, 0.0);
    return out;
}

} // namespace isac
