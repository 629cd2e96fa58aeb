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

#ifndef ISAC_ANALYSIS_HPP
#define ISAC_ANALYSIS_HPP

#include "isac/background.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace isac
{

// ---- profiles -----------------------------------------------------------

/// Uniform delay axis. Bin i is centred on start_s + i * step_s and a path
/// falls into the nearest bin.
struct DelayGrid
{
    double start_s = 0.0;
    double step_s = 1e-9;
    std::size_t count = 0;

    static DelayGrid covering(double max_delay_s, double step_s);
    double delay_at(std::size_t i) const { return start_s + static_cast<double>(i) * step_s; }
    std::optional<std::size_t> bin_of(double delay_s) const;
    void validate() const;
};

/// Non-coherent power per delay bin. Paths outside the grid are dropped, so
/// the bins sum to the total power of the in-range paths.
Eigen::VectorXd pdp(const Cir& cir, const DelayGrid& grid);

/// One CIR per turntable angle.
struct ScanGrid
{
    std::vector<double> angles_deg; // strictly increasing, uniform step
    std::vector<Cir> cirs;
    DelayGrid delays;

    /// Angles start, start + step, ... up to stop; a 360 degree range omits
    /// the duplicate end angle.
    static std::vector<double> angles(double start_deg, double stop_deg, double step_deg);
    void validate() const;
};

struct Padp
{
    std::vector<double> angles_deg;
    DelayGrid delays;
    Eigen::MatrixXd power; // angle x delay, linear

    double angle_step_deg() const;
    /// True when the angle axis wraps around a full turn.
    bool full_circle() const;
    void validate() const;
};

Padp padp(const ScanGrid& grid);

// ---- path extraction ----------------------------------------------------

struct PathPeak
{
    double angle_deg = 0.0;
    double delay_s = 0.0;
    double power = 0.0; // linear
    PathOrigin origin = PathOrigin::background;
    int bounce_order = -1; // -1: not classified
    std::vector<std::string> route_labels;
};

/// Two peaks conflict when they are closer than both limits at once.
struct PeakSeparation
{
    double angle_deg = 5.0;
    double delay_s = 0.0;
};

/// Local maxima of the PADP within threshold_db of the global peak, pruned
/// greedily (strongest first) so no two kept peaks conflict. Output is
/// sorted by descending power.
std::vector<PathPeak> extract_paths(const Padp& padp, double threshold_db, const PeakSeparation& min_separation = {});

struct SubtractionOptions
{
    PeakSeparation match_tol{2.5, 0.0}; // inclusive matching window
    double margin_db = 6.0;
    double threshold_db = 30.0;
    PeakSeparation min_separation{};
};

/// Peaks of the target scan that exceed the background by more than the
/// margin. The reference is the strongest background peak inside match_tol,
/// or the background cell at the same (angle, delay) when none matches.
/// Returned peaks carry origin = target.
std::vector<PathPeak> subtract_background(const Padp& target_scan, const Padp& background_scan,
                                          const SubtractionOptions& options = {});

// ---- geometric reconstruction -------------------------------------------

struct ReconstructionScene
{
    enum class ScanSide
    {
        rx, // scan angle is the arrival direction at the Rx
        tx  // scan angle is the departure direction at the Tx
    };

    Eigen::Vector3d tx = Eigen::Vector3d::Zero();
    Eigen::Vector3d rx = Eigen::Vector3d::Zero();
    Eigen::Vector3d target = Eigen::Vector3d::Zero();
    std::vector<GeometricScatterer> reflectors;
    double beamwidth_deg = 10.0;
    ScanSide scan_side = ScanSide::rx;

    void validate() const;
};

struct BounceClassification
{
    int order = -1; // non-target interactions; -1 when no route fits
    double route_length_m = 0.0;
    double residual_s = 0.0;
    std::vector<std::string> route_labels;

    bool classified() const { return order >= 0; }
};

/// Searches Tx -> ... -> target -> ... -> Rx routes through up to two point
/// reflectors. The smallest order whose length / c is within delay_tol of
/// the peak delay and whose scan-side azimuth is within angle_tol wins; ties
/// go to the smaller delay residual.
BounceClassification classify_bounce(const PathPeak& path, const ReconstructionScene& scene, double delay_tol_s,
                                     double angle_tol_deg = 2.5);

struct PowerProportion
{
    double pp0 = 0.0;
    double pp1 = 0.0;
    double pp2_plus = 0.0;
    double classified_power = 0.0;
    std::size_t unclassified = 0;
};

/// Fractions of classified target power per bounce order. Paths with a
/// negative order are counted but excluded from the ratios.
PowerProportion power_proportion(std::span<const PathPeak> paths);

// ---- shared scatterers --------------------------------------------------

struct ScatteredPath
{
    cd gain{0.0, 0.0};
    double scattering_gain = 1.0;
};

/// |sum_shared a sigma|^2 / |sum_all a sigma|^2 with coherent sums. Partial
/// cancellation among nonshared paths can push the ratio above one.
double sharing_degree(std::span<const ScatteredPath> shared, std::span<const ScatteredPath> nonshared);

struct SharedPartition
{
    std::vector<std::pair<std::size_t, std::size_t>> shared; // (mono index, bi index)
    std::vector<std::size_t> mono_only;
    std::vector<std::size_t> bi_only;
    std::size_t unlocalizable = 0;
};

/// Scatterer position implied by a mono-static echo seen from `node`.
Eigen::Vector3d localize_monostatic(const PathPeak& path, const Eigen::Vector3d& node);

/// Scatterer position implied by a single-bounce bi-static path, solving
/// the delay ellipse along the scan direction. Empty when no point of that
/// ray has the required total length.
std::optional<Eigen::Vector3d> localize_bistatic(const PathPeak& path, const ReconstructionScene& scene);

/// Pairs mono-static and bi-static paths whose implied scatterers lie within
/// position_tol (greedy, nearest first). Bi-static paths that cannot be
/// localized are excluded and counted.
SharedPartition identify_shared(std::span<const PathPeak> mono_paths, const Eigen::Vector3d& mono_position,
                                std::span<const PathPeak> bi_paths, const ReconstructionScene& scene,
                                double position_tol_m);

} // namespace isac

#endif // ISAC_ANALYSIS_HPP
