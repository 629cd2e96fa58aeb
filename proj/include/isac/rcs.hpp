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

#ifndef ISAC_RCS_HPP
#define ISAC_RCS_HPP

#include "isac/core.hpp"

#include <array>
#include <filesystem>
#include <variant>
#include <vector>

namespace isac
{

struct RcsConstant
{
    double sigma_dbsm = 0.0;
};

/// sigma0 * max((1 + r_in . r_out) / 2, 1e-6)^exponent. Peaks for
/// backscatter (outgoing direction equal to the incoming arrival direction).
struct RcsCosineLobe
{
    double sigma_dbsm = 0.0;
    double exponent = 0.0;
};

struct RcsTableEntry
{
    double az_in_deg;
    double el_in_deg;
    double az_out_deg;
    double el_out_deg;
    double rcs_dbsm;
};

/// Regular grid over (az_in, el_in, az_out, el_out) in degrees, interpolated
/// multilinearly in dBsm. Queries outside the grid clamp to its edge.
class RcsTable
{
public:
    static RcsTable from_entries(const std::vector<RcsTableEntry>& entries);
    /// CSV with header az_in_deg,el_in_deg,az_out_deg,el_out_deg,rcs_dbsm.
    static RcsTable load_csv(const std::filesystem::path& path);

    double eval_dbsm(const Angle3D& g_in, const Angle3D& g_out) const;

    std::vector<RcsTableEntry> entries() const;
    const std::array<std::vector<double>, 4>& axes() const { return axes_; }

private:
    std::array<std::vector<double>, 4> axes_;
    std::vector<double> values_; // row-major over axes_ order
};

using RcsModel = std::variant<RcsConstant, RcsTable, RcsCosineLobe>;

/// RCS for arrival direction g_in and departure direction g_out at the
/// scatterer, in dBsm. Throws DomainError when the model yields a
/// non-finite value.
double rcs_eval_dbsm(const RcsModel& model, const Angle3D& g_in, const Angle3D& g_out);

/// Same, linear m^2.
double rcs_eval(const RcsModel& model, const Angle3D& g_in, const Angle3D& g_out);

/// A scattering centre of a sensing target.
struct ScatteringPoint
{
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    RcsModel rcs = RcsConstant{};
    PolarimetricAmplitude cpm = PolarimetricAmplitude::Identity();
};

} // namespace isac

#endif // ISAC_RCS_HPP
