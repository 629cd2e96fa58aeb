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

#include "isac/link_budget.hpp"

#include <algorithm>

namespace isac
{

PathLossModel PathLossModel::free_space(double frequency_hz)
{
    PathLossModel m;
    m.kind = Kind::free_space;
    m.frequency_hz = frequency_hz;
    return m;
}

PathLossModel PathLossModel::abg(double alpha, double beta, double gamma, double frequency_hz)
{
    PathLossModel m;
    m.kind = Kind::abg;
    m.alpha = alpha;
    m.beta = beta;
    m.gamma = gamma;
    m.frequency_hz = frequency_hz;
    return m;
}

PathLossModel PathLossModel::table(std::vector<double> distance_m, std::vector<double> loss_db, double frequency_hz)
{
    if (distance_m.empty() || distance_m.size() != loss_db.size())
        throw ValidationError("path-loss table: distance and loss columns must be non-empty and equal length");
    if (!std::is_sorted(distance_m.begin(), distance_m.end()) ||
        std::adjacent_find(distance_m.begin(), distance_m.end()) != distance_m.end())
        throw ValidationError("path-loss table: distances must be strictly increasing");
    PathLossModel m;
    m.kind = Kind::table;
    m.table_distance_m = std::move(distance_m);
    m.table_loss_db = std::move(loss_db);
    m.frequency_hz = frequency_hz;
    return m;
}

double PathLossModel::loss_db(double distance_m) const
{
    if (!(distance_m > 0.0))
        throw DomainError("path loss: distance must be positive");
    switch (kind)
    {
    case Kind::free_space:
        return 20.0 * std::log10(4.0 * kPi * distance_m / wavelength(frequency_hz));
    case Kind::abg:
        return 10.0 * alpha * std::log10(distance_m) + beta + 10.0 * gamma * std::log10(frequency_hz / 1e9);
    case Kind::table:
    {
        const auto& d = table_distance_m;
        if (distance_m <= d.front())
            return table_loss_db.front();
        if (distance_m >= d.back())
            return table_loss_db.back();
        const auto hi = static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), distance_m) - d.begin());
        const double w = (distance_m - d[hi - 1]) / (d[hi] - d[hi - 1]);
        return (1.0 - w) * table_loss_db[hi - 1] + w * table_loss_db[hi];
    }
    }
    throw ValidationError("path loss: unknown model");
}

double radar_pathloss(double pl1_db, double pl2_db, double wavelength_m, double sigma_dbsm)
{
    return pl1_db + pl2_db + spreading_term_db(wavelength_m) - sigma_dbsm;
}

double estimate_rcs(double pl1_db, double pl2_db, double pl_tar_db, double wavelength_m)
{
    return pl1_db + pl2_db - pl_tar_db + spreading_term_db(wavelength_m);
}

LineFit fit_rcs_line(std::span<const RcsSample> samples)
{
    if (samples.size() < 2)
        throw ValidationError("fit_rcs_line: need at least two samples");
    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd sigma(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        design(i, 0) = 1.0;
        design(i, 1) = samples[static_cast<std::size_t>(i)].distance_m;
        sigma(i) = samples[static_cast<std::size_t>(i)].sigma_dbsm;
    }
    const Eigen::VectorXd d = design.col(1);
    if ((d.array() == d(0)).all())
        throw ValidationError("fit_rcs_line: degenerate fit, all distances identical");

    // centre the regressor so the 2x2 normal system is well conditioned
    const double d_mean = d.mean();
    const double s_mean = sigma.mean();
    const Eigen::VectorXd dc = d.array() - d_mean;
    const double slope = dc.dot(sigma.array().matrix() - Eigen::VectorXd::Constant(n, s_mean)) / dc.squaredNorm();
    const double intercept = s_mean - slope * d_mean;
    const Eigen::VectorXd residual = sigma - design * Eigen::Vector2d(intercept, slope);
    return {slope, intercept, std::sqrt(residual.squaredNorm() / static_cast<double>(n))};
}

double conv_path_power(double p1_db, double p2_db, double sigma_dbsm, double wavelength_m)
{
    return p1_db + p2_db + sigma_dbsm - spreading_term_db(wavelength_m);
}

} // namespace isac
