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

#ifndef ISAC_LINK_BUDGET_HPP
#define ISAC_LINK_BUDGET_HPP

#include "isac/core.hpp"

#include <span>
#include <vector>

namespace isac
{

/// Large-scale path loss in dB (positive = loss).
struct PathLossModel
{
    enum class Kind
    {
        free_space, // 20 log10(4 pi d / lambda)
        abg,        // 10 alpha log10(d) + beta + 10 gamma log10(f / 1 GHz)
        table       // linear interpolation in d, clamped
    };

    Kind kind = Kind::free_space;
    double frequency_hz = 0.0;
    double alpha = 2.0;
    double beta = 0.0;
    double gamma = 2.0;
    std::vector<double> table_distance_m;
    std::vector<double> table_loss_db;

    static PathLossModel free_space(double frequency_hz);
    static PathLossModel abg(double alpha, double beta, double gamma, double frequency_hz);
    static PathLossModel table(std::vector<double> distance_m, std::vector<double> loss_db, double frequency_hz);

    double loss_db(double distance_m) const;
    double gain_linear(double distance_m) const { return db_to_linear(-loss_db(distance_m)); }
};

// All link-budget quantities are dB; powers are gains relative to the
// transmitted power, path losses are positive losses.

/// Radar equation: PL_tar = PL1 + PL2 + 10 log10(lambda^2 / 4 pi) - sigma.
double radar_pathloss(double pl1_db, double pl2_db, double wavelength_m, double sigma_dbsm);

/// Inverse of radar_pathloss in sigma.
double estimate_rcs(double pl1_db, double pl2_db, double pl_tar_db, double wavelength_m);

struct RcsSample
{
    double distance_m; // target-Rx distance d2
    double sigma_dbsm;
};

struct LineFit
{
    double slope;     // dB per m
    double intercept; // dBsm
    double rmse;      // dB
};

/// Ordinary least squares sigma = intercept + slope * d2.
LineFit fit_rcs_line(std::span<const RcsSample> samples);

/// Theoretical concatenated path power P1 + P2 + sigma - 10 log10(lambda^2 / 4 pi).
double conv_path_power(double p1_db, double p2_db, double sigma_dbsm, double wavelength_m);

/// Theory minus measurement.
inline double delta_p(double p_conv_db, double p_measured_db)
{
    return p_conv_db - p_measured_db;
}

} // namespace isac

#endif // ISAC_LINK_BUDGET_HPP
