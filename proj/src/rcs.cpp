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

#include "isac/rcs.hpp"
#include "csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace isac
{

namespace
{

std::size_t axis_index(const std::vector<double>& axis, double v)
{
    const auto it = std::lower_bound(axis.begin(), axis.end(), v);
    if (it == axis.end() || *it != v)
        throw ValidationError("rcs table: value not on grid axis");
    return static_cast<std::size_t>(it - axis.begin());
}

// Lower index and weight of the upper neighbour, clamped to the axis.
std::pair<std::size_t, double> bracket(const std::vector<double>& axis, double v)
{
    if (axis.size() == 1 || v <= axis.front())
        return {0, 0.0};
    if (v >= axis.back())
        return {axis.size() - 1, 0.0};
    const auto hi = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), v) - axis.begin());
    const std::size_t lo = hi - 1;
    return {lo, (v - axis[lo]) / (axis[hi] - axis[lo])};
}

} // namespace

RcsTable RcsTable::from_entries(const std::vector<RcsTableEntry>& entries)
{
    if (entries.empty())
        throw ValidationError("rcs table: no entries");
    RcsTable t;
    for (const auto& e : entries)
    {
        const double coords[4] = {e.az_in_deg, e.el_in_deg, e.az_out_deg, e.el_out_deg};
        for (std::size_t k = 0; k < 4; ++k)
        {
            if (!std::isfinite(coords[k]))
                throw ValidationError("rcs table: non-finite angle");
            t.axes_[k].push_back(coords[k]);
        }
        if (!std::isfinite(e.rcs_dbsm))
            throw ValidationError("rcs table: non-finite rcs value");
    }
    std::size_t total = 1;
    for (auto& axis : t.axes_)
    {
        std::sort(axis.begin(), axis.end());
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
        total *= axis.size();
    }
    if (total != entries.size())
        throw ValidationError("rcs table: entries do not form a complete grid (" + std::to_string(entries.size()) +
                              " entries, " + std::to_string(total) + " grid cells)");

    t.values_.assign(total, std::numeric_limits<double>::quiet_NaN());
    for (const auto& e : entries)
    {
        const std::size_t i0 = axis_index(t.axes_[0], e.az_in_deg);
        const std::size_t i1 = axis_index(t.axes_[1], e.el_in_deg);
        const std::size_t i2 = axis_index(t.axes_[2], e.az_out_deg);
        const std::size_t i3 = axis_index(t.axes_[3], e.el_out_deg);
        const std::size_t flat =
            ((i0 * t.axes_[1].size() + i1) * t.axes_[2].size() + i2) * t.axes_[3].size() + i3;
        if (!std::isnan(t.values_[flat]))
            throw ValidationError("rcs table: duplicate grid cell");
        t.values_[flat] = e.rcs_dbsm;
    }
    return t;
}

RcsTable RcsTable::load_csv(const std::filesystem::path& path)
{
    const auto rows = detail::read_csv(path);
    const std::vector<std::string> header{"az_in_deg", "el_in_deg", "az_out_deg", "el_out_deg", "rcs_dbsm"};
    if (rows.empty() || rows.front() != header)
        throw ValidationError("rcs table " + path.string() + ": expected header " +
                              "az_in_deg,el_in_deg,az_out_deg,el_out_deg,rcs_dbsm");
    std::vector<RcsTableEntry> entries;
    for (std::size_t r = 1; r < rows.size(); ++r)
    {
        const auto& row = rows[r];
        if (row.size() != 5)
            throw ValidationError("rcs table " + path.string() + ": row " + std::to_string(r) + " needs 5 fields");
        entries.push_back({detail::parse_double(row[0]), detail::parse_double(row[1]), detail::parse_double(row[2]),
                           detail::parse_double(row[3]), detail::parse_double(row[4])});
    }
    return from_entries(entries);
}

double RcsTable::eval_dbsm(const Angle3D& g_in, const Angle3D& g_out) const
{
    const double q[4] = {g_in.azimuth_deg(), g_in.elevation_deg(), g_out.azimuth_deg(), g_out.elevation_deg()};
    std::array<std::pair<std::size_t, double>, 4> b;
    for (std::size_t k = 0; k < 4; ++k)
        b[k] = bracket(axes_[k], q[k]);

    double acc = 0.0;
    for (unsigned corner = 0; corner < 16; ++corner)
    {
        double w = 1.0;
        std::size_t idx[4];
        for (std::size_t k = 0; k < 4; ++k)
        {
            const bool upper = (corner >> k) & 1u;
            const auto [lo, frac] = b[k];
            if (upper)
            {
                if (frac == 0.0)
                {
                    w = 0.0;
                    break;
                }
                idx[k] = lo + 1;
                w *= frac;
            }
            else
            {
                idx[k] = lo;
                w *= 1.0 - frac;
            }
        }
        if (w == 0.0)
            continue;
        const std::size_t flat = ((idx[0] * axes_[1].size() + idx[1]) * axes_[2].size() + idx[2]) * axes_[3].size() + idx[3];
        acc += w * values_[flat];
    }
    return acc;
}

std::vector<RcsTableEntry> RcsTable::entries() const
{
    std::vector<RcsTableEntry> out;
    out.reserve(values_.size());
    std::size_t flat = 0;
    for (double a0 : axes_[0])
        for (double a1 : axes_[1])
            for (double a2 : axes_[2])
                for (double a3 : axes_[3])
                    out.push_back({a0, a1, a2, a3, values_[flat++]});
    return out;
}

double rcs_eval_dbsm(const RcsModel& model, const Angle3D& g_in, const Angle3D& g_out)
{
    const double value = std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RcsConstant>)
                return m.sigma_dbsm;
            else if constexpr (std::is_same_v<T, RcsTable>)
                return m.eval_dbsm(g_in, g_out);
            else
            {
                const double c = 0.5 * (1.0 + unit_vector(g_in).dot(unit_vector(g_out)));
                return m.sigma_dbsm + m.exponent * linear_to_db(std::max(c, 1e-6));
            }
        },
        model);
    if (!std::isfinite(value))
    {
        std::ostringstream msg;
        msg << "rcs evaluation is not finite for g_in=(" << g_in.azimuth_deg() << ", " << g_in.elevation_deg()
            << ") deg, g_out=(" << g_out.azimuth_deg() << ", " << g_out.elevation_deg() << ") deg";
        throw DomainError(msg.str());
    }
    return value;
}

double rcs_eval(const RcsModel& model, const Angle3D& g_in, const Angle3D& g_out)
{
    return db_to_linear(rcs_eval_dbsm(model, g_in, g_out));
}

} // namespace isac
