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

#ifndef ISAC_TARGET_HPP
#define ISAC_TARGET_HPP

#include "isac/gbsm.hpp"
#include "isac/rcs.hpp"

#include <span>

namespace isac
{

enum class SubLinkSide
{
    tx_to_target, // ray AoA is the arrival direction at the target
    target_to_rx  // ray AoD is the departure direction from the target
};

struct SubLink
{
    SubLinkSide side = SubLinkSide::tx_to_target;
    ClusterSet clusters;
};

/// Sets sub-link ray Doppler from target motion: v . r_in / lambda on the
/// Tx-target side, v . r_out / lambda on the target-Rx side.
void apply_target_motion(SubLink& link, const Eigen::Vector3d& velocity, double wavelength_m);

/// Concatenated target channel through one scattering point.
///
/// Every ray pair (a_i, b_j) becomes one path with delay tau_i + tau_j,
/// Doppler f_i + f_j, AoD of a_i, AoA of b_j, bounce order b_i + b_j, and
/// amplitude
///   sqrt(P_i P_j) F_rx^T CPM_j CPM_k sqrt(sigma(r_out_j, r_in_i)) CPM_i F_tx
///   * sqrt(4 pi / lambda^2) * array/target phase terms,
/// with P the per-ray sub-link power. The 4 pi / lambda^2 concatenation gain
/// is applied here and nowhere else. Output is sorted by delay, not merged.
Cir concatenate(const SubLink& a, const SubLink& b, const ScatteringPoint& sp, const AntennaModel& tx,
                const AntennaModel& rx, const LinkContext& link);

/// One scattering point with its two sub-links and its large-scale gain
/// (linear PL_k^tar of the two sub-links, without the RCS/spreading terms).
struct TargetPoint
{
    ScatteringPoint point;
    SubLink tx_link;
    SubLink rx_link;
    double pl_gain_linear = 1.0;
};

/// Coherent union over scattering points, each scaled by sqrt(pl_gain).
/// Paths with identical (delay, AoA, AoD) are combined.
Cir multi_point_target(std::span<const TargetPoint> points, const AntennaModel& tx, const AntennaModel& rx,
                       const LinkContext& link);

} // namespace isac

#endif // ISAC_TARGET_HPP
