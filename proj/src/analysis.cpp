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

#include "isac/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace isac
{

namespace
{

constexpr double kAngleEps = 1e-9;

bool finite(const Eigen::Vector3d& v)
{
    return v.allFinite();
}

// Angle difference on the scan axis; wraps only for a full-circle scan.
double angle_gap_deg(const Padp& p, double a, double b)
{
    return p.full_circle() ? std::abs(wrapped_difference_deg(a, b)) : std::abs(a - b);
}

double azimuth_deg_of(const Eigen::Vector3d& v)
{
    return rad_to_deg(wrap_two_pi(std::atan2(v.y(), v.x())));
}

} // namespace

// ---- profiles -----------------------------------------------------------

DelayGrid DelayGrid::covering(double max_delay_s, double step_s)
{
    if (!(step_s > 0.0) || !(max_delay_s >= 0.0))
        throw ValidationError("DelayGrid: step must be positive and max delay non-negative");
    return {0.0, step_s, static_cast<std::size_t>(std::floor(max_delay_s / step_s)) + 2};
}

std::optional<std::size_t> DelayGrid::bin_of(double delay_s) const
{
    const double pos = std::round((delay_s - start_s) / step_s);
    if (!(pos >= 0.0) || pos >= static_cast<double>(count))
        return std::nullopt;
    return static_cast<std::size_t>(pos);
}

void DelayGrid::validate() const
{
    if (!(step_s > 0.0) || !std::isfinite(step_s) || !std::isfinite(start_s))
        throw ValidationError("DelayGrid: step must be positive and finite");
    if (count == 0)
        throw ValidationError("DelayGrid: no bins");
}

Eigen::VectorXd pdp(const Cir& cir, const DelayGrid& grid)
{
    grid.validate();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.count));
    for (const auto& p : cir.paths)
        if (const auto bin = grid.bin_of(p.delay_s))
            out(static_cast<Eigen::Index>(*bin)) += p.power();
    return out;
}

std::vector<double> ScanGrid::angles(double start_deg, double stop_deg, double step_deg)
{
    if (!(step_deg > 0.0) || !(stop_deg > start_deg))
        throw ValidationError("scan: need step > 0 and stop > start");
    const double range = stop_deg - start_deg;
    const double steps = range / step_deg;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw ValidationError("scan: step does not divide the scan range");
    const auto n = static_cast<std::size_t>(std::llround(steps));
    const bool full_turn = std::abs(range - 360.0) < 1e-9;
    std::vector<double> out;
    for (std::size_t i = 0; i < (full_turn ? n : n + 1); ++i)
        out.push_back(start_deg + static_cast<double>(i) * step_deg);
    return out;
}

void ScanGrid::validate() const
{
    delays.validate();
    if (angles_deg.empty())
        throw ValidationError("ScanGrid: no angles");
    if (angles_deg.size() != cirs.size())
        throw ValidationError("ScanGrid: " + std::to_string(angles_deg.size()) + " angles but " +
                              std::to_string(cirs.size()) + " CIRs");
    if (angles_deg.size() > 1)
    {
        const double step = angles_deg[1] - angles_deg[0];
        for (std::size_t i = 1; i < angles_deg.size(); ++i)
        {
            const double d = angles_deg[i] - angles_deg[i - 1];
            if (!(d > 0.0) || std::abs(d - step) > 1e-9)
                throw ValidationError("ScanGrid: angles must be strictly increasing with a uniform step");
        }
    }
}

double Padp::angle_step_deg() const
{
    return angles_deg.size() > 1 ? angles_deg[1] - angles_deg[0] : 0.0;
}

bool Padp::full_circle() const
{
    const double step = angle_step_deg();
    return step > 0.0 && std::abs(step * static_cast<double>(angles_deg.size()) - 360.0) < 1e-9;
}

void Padp::validate() const
{
    delays.validate();
    if (angles_deg.empty() || power.size() == 0)
        throw ValidationError("PADP is empty");
    if (power.rows() != static_cast<Eigen::Index>(angles_deg.size()) ||
        power.cols() != static_cast<Eigen::Index>(delays.count))
        throw ValidationError("PADP: array shape does not match its axes");
}

Padp padp(const ScanGrid& grid)
{
    grid.validate();
    Padp out{grid.angles_deg, grid.delays,
             Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.angles_deg.size()),
                                   static_cast<Eigen::Index>(grid.delays.count))};
    for (std::size_t i = 0; i < grid.cirs.size(); ++i)
        out.power.row(static_cast<Eigen::Index>(i)) = pdp(grid.cirs[i], grid.delays).transpose();
    return out;
}

// ---- path extraction ----------------------------------------------------

std::vector<PathPeak> extract_paths(const Padp& p, double threshold_db, const PeakSeparation& min_separation)
{
    p.validate();
    if (!(threshold_db > 0.0))
        throw ValidationError("extract_paths: threshold must be a positive number of dB");
    const double global = p.power.maxCoeff();
    if (!(global > 0.0))
        return {};
    const double floor = global * db_to_linear(-threshold_db);
    const Eigen::Index rows = p.power.rows();
    const Eigen::Index cols = p.power.cols();
    const bool wrap = p.full_circle();

    struct Cell
    {
        Eigen::Index r, c;
        double v;
    };
    const auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };
    const auto neighbours = [&](Eigen::Index r, Eigen::Index c, auto&& visit) {
        for (Eigen::Index dr = -1; dr <= 1; ++dr)
            for (Eigen::Index dc = -1; dc <= 1; ++dc)
            {
                if ((dr == 0) == (dc == 0))
                    continue;
                Eigen::Index rr = r + dr;
                const Eigen::Index cc = c + dc;
                if (wrap)
                    rr = (rr + rows) % rows;
                if (rr < 0 || rr >= rows || cc < 0 || cc >= cols || (rr == r && cc == c))
                    continue;
                visit(rr, cc);
            }
    };

    // A maximum is a 4-connected region of equal cells with no strictly
    // higher axis neighbour; flat regions (e.g. an antenna floor) count once and
    // are reported at their first cell.
    std::vector<Cell> candidates;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows, cols, false);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
        {
            const double v = p.power(r, c);
            if (seen(r, c) || !(v >= floor) || v <= 0.0)
                continue;
            bool is_max = true;
            std::vector<std::pair<Eigen::Index, Eigen::Index>> stack{{r, c}};
            seen(r, c) = true;
            while (!stack.empty())
            {
                const auto [cr, cc] = stack.back();
                stack.pop_back();
                neighbours(cr, cc, [&](Eigen::Index rr, Eigen::Index c2) {
                    const double w = p.power(rr, c2);
                    if (same(w, v))
                    {
                        if (!seen(rr, c2))
                        {
                            seen(rr, c2) = true;
                            stack.emplace_back(rr, c2);
                        }
                    }
                    else if (w > v)
                        is_max = false;
                });
            }
            if (is_max)
                candidates.push_back({r, c, v});
        }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Cell& a, const Cell& b) { return a.v > b.v; });

    std::vector<PathPeak> out;
    for (const auto& cell : candidates)
    {
        PathPeak peak;
        peak.angle_deg = p.angles_deg[static_cast<std::size_t>(cell.r)];
        peak.delay_s = p.delays.delay_at(static_cast<std::size_t>(cell.c));
        peak.power = cell.v;
        const bool conflicts = std::any_of(out.begin(), out.end(), [&](const PathPeak& kept) {
            return angle_gap_deg(p, kept.angle_deg, peak.angle_deg) < min_separation.angle_deg - kAngleEps &&
                   std::abs(kept.delay_s - peak.delay_s) < min_separation.delay_s;
        });
        // zero separation in both axes still rejects exact duplicates
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const PathPeak& kept) {
            return kept.angle_deg == peak.angle_deg && kept.delay_s == peak.delay_s;
        });
        if (!conflicts && !duplicate)
            out.push_back(std::move(peak));
    }
    return out;
}

std::vector<PathPeak> subtract_background(const Padp& target_scan, const Padp& background_scan,
                                          const SubtractionOptions& options)
{
    target_scan.validate();
    background_scan.validate();
    const auto same_axis = [](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > 1e-9)
                return false;
        return true;
    };
    const auto& td = target_scan.delays;
    const auto& bd = background_scan.delays;
    if (!same_axis(target_scan.angles_deg, background_scan.angles_deg) || td.count != bd.count ||
        std::abs(td.step_s - bd.step_s) > 1e-15 || std::abs(td.start_s - bd.start_s) > 1e-15)
        throw ValidationError("subtract_background: target and background grids differ");
    if (!(options.margin_db >= 0.0))
        throw ValidationError("subtract_background: margin must be non-negative");

    const auto target_peaks = extract_paths(target_scan, options.threshold_db, options.min_separation);
    const auto background_peaks = extract_paths(background_scan, options.threshold_db, options.min_separation);
    const double margin = db_to_linear(options.margin_db);

    std::vector<PathPeak> out;
    for (const auto& t : target_peaks)
    {
        double reference = -1.0;
        for (const auto& b : background_peaks)
            if (angle_gap_deg(target_scan, t.angle_deg, b.angle_deg) <= options.match_tol.angle_deg + kAngleEps &&
                std::abs(t.delay_s - b.delay_s) <= options.match_tol.delay_s + 1e-15)
                reference = std::max(reference, b.power);
        if (reference < 0.0)
        {
            const auto row = std::find_if(background_scan.angles_deg.begin(), background_scan.angles_deg.end(),
                                          [&](double a) { return std::abs(a - t.angle_deg) < 1e-9; }) -
                             background_scan.angles_deg.begin();
            const auto col = bd.bin_of(t.delay_s);
            reference = col ? background_scan.power(row, static_cast<Eigen::Index>(*col)) : 0.0;
        }
        if (t.power > reference * margin)
        {
            PathPeak tagged = t;
            tagged.origin = PathOrigin::target;
            out.push_back(std::move(tagged));
        }
    }
    return out;
}

// ---- geometric reconstruction -------------------------------------------

void ReconstructionScene::validate() const
{
    if (!finite(tx) || !finite(rx) || !finite(target))
        throw ValidationError("ReconstructionScene: node coordinates must be finite");
    for (const auto& r : reflectors)
        if (!finite(r.position))
            throw ValidationError("ReconstructionScene: reflector '" + r.label + "' has non-finite coordinates");
    if (!(beamwidth_deg > 0.0))
        throw ValidationError("ReconstructionScene: beamwidth must be positive");
}

BounceClassification classify_bounce(const PathPeak& path, const ReconstructionScene& scene, double delay_tol_s,
                                     double angle_tol_deg)
{
    scene.validate();

    struct Node
    {
        const Eigen::Vector3d* position;
        std::string label;
    };
    std::vector<Node> reflectors;
    for (std::size_t i = 0; i < scene.reflectors.size(); ++i)
    {
        const auto& r = scene.reflectors[i];
        reflectors.push_back({&r.position, r.label.empty() ? "reflector " + std::to_string(i) : r.label});
    }

    BounceClassification best;
    const auto consider = [&](const std::vector<const Node*>& before, const std::vector<const Node*>& after) {
        std::vector<Node> route;
        route.push_back({&scene.tx, "tx"});
        for (const Node* n : before)
            route.push_back(*n);
        route.push_back({&scene.target, "target"});
        for (const Node* n : after)
            route.push_back(*n);
        route.push_back({&scene.rx, "rx"});

        double length = 0.0;
        for (std::size_t i = 1; i < route.size(); ++i)
        {
            const double leg = (*route[i].position - *route[i - 1].position).norm();
            if (leg < 1e-12)
                return; // degenerate: consecutive coincident nodes
            length += leg;
        }
        const double residual = std::abs(length / kSpeedOfLight - path.delay_s);
        if (residual > delay_tol_s)
            return;

        const Eigen::Vector3d leg = scene.scan_side == ReconstructionScene::ScanSide::rx
                                        ? Eigen::Vector3d(*route[route.size() - 2].position - scene.rx)
                                        : Eigen::Vector3d(*route[1].position - scene.tx);
        if (std::abs(wrapped_difference_deg(azimuth_deg_of(leg), path.angle_deg)) > angle_tol_deg + kAngleEps)
            return;

        const int order = static_cast<int>(before.size() + after.size());
        if (best.classified() && std::tie(best.order, best.residual_s) <= std::tie(order, residual))
            return;
        best.order = order;
        best.route_length_m = length;
        best.residual_s = residual;
        best.route_labels.clear();
        for (const auto& n : route)
            best.route_labels.push_back(n.label);
    };

    consider({}, {});
    for (const auto& a : reflectors)
    {
        consider({&a}, {});
        consider({}, {&a});
    }
    for (const auto& a : reflectors)
        for (const auto& b : reflectors)
        {
            consider({&a}, {&b});
            if (&a == &b)
                continue;
            consider({&a, &b}, {});
            consider({}, {&a, &b});
        }
    return best;
}

PowerProportion power_proportion(std::span<const PathPeak> paths)
{
    PowerProportion pp;
    double p[3] = {0.0, 0.0, 0.0};
    for (const auto& path : paths)
    {
        if (path.bounce_order < 0)
        {
            ++pp.unclassified;
            continue;
        }
        p[std::min(path.bounce_order, 2)] += path.power;
    }
    pp.classified_power = p[0] + p[1] + p[2];
    if (!(pp.classified_power > 0.0))
        throw DomainError("power_proportion: classified target power is zero");
    pp.pp0 = p[0] / pp.classified_power;
    pp.pp1 = p[1] / pp.classified_power;
    pp.pp2_plus = p[2] / pp.classified_power;
    return pp;
}

// ---- shared scatterers --------------------------------------------------

double sharing_degree(std::span<const ScatteredPath> shared, std::span<const ScatteredPath> nonshared)
{
    if (shared.empty() && nonshared.empty())
        throw ValidationError("sharing_degree: no paths");
    const auto sum = [](std::span<const ScatteredPath> s) {
        cd acc{0.0, 0.0};
        for (const auto& p : s)
            acc += p.gain * p.scattering_gain;
        return acc;
    };
    const cd s = sum(shared);
    const double total = std::norm(s + sum(nonshared));
    if (!(total > 0.0))
        throw DomainError("sharing_degree: total coherent power is zero");
    return std::norm(s) / total;
}

Eigen::Vector3d localize_monostatic(const PathPeak& path, const Eigen::Vector3d& node)
{
    const double range = kSpeedOfLight * path.delay_s / 2.0;
    return node + range * unit_vector(deg_to_rad(path.angle_deg), 0.0);
}

std::optional<Eigen::Vector3d> localize_bistatic(const PathPeak& path, const ReconstructionScene& scene)
{
    const bool at_rx = scene.scan_side == ReconstructionScene::ScanSide::rx;
    const Eigen::Vector3d& s = at_rx ? scene.rx : scene.tx;
    const Eigen::Vector3d& o = at_rx ? scene.tx : scene.rx;
    const Eigen::Vector3d u = unit_vector(deg_to_rad(path.angle_deg), 0.0);
    const Eigen::Vector3d w = s - o;
    const double total = kSpeedOfLight * path.delay_s;
    const double denom = 2.0 * (total + w.dot(u));
    if (!(total > w.norm()) || !(denom > 0.0))
        return std::nullopt;
    const double range = (total * total - w.squaredNorm()) / denom;
    return s + range * u;
}

SharedPartition identify_shared(std::span<const PathPeak> mono_paths, const Eigen::Vector3d& mono_position,
                                std::span<const PathPeak> bi_paths, const ReconstructionScene& scene,
                                double position_tol_m)
{
    if (!(position_tol_m >= 0.0))
        throw ValidationError("identify_shared: position tolerance must be non-negative");
    std::vector<Eigen::Vector3d> mono(mono_paths.size());
    for (std::size_t i = 0; i < mono_paths.size(); ++i)
        mono[i] = localize_monostatic(mono_paths[i], mono_position);

    SharedPartition out;
    std::vector<std::optional<Eigen::Vector3d>> bi(bi_paths.size());
    for (std::size_t j = 0; j < bi_paths.size(); ++j)
    {
        bi[j] = localize_bistatic(bi_paths[j], scene);
        if (!bi[j])
            ++out.unlocalizable;
    }

    struct Candidate
    {
        double distance;
        std::size_t mono, bi;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < mono.size(); ++i)
        for (std::size_t j = 0; j < bi.size(); ++j)
            if (bi[j])
            {
                const double d = (mono[i] - *bi[j]).norm();
                if (d <= position_tol_m)
                    candidates.push_back({d, i, j});
            }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });

    std::vector<bool> mono_used(mono.size(), false);
    std::vector<bool> bi_used(bi.size(), false);
    for (const auto& c : candidates)
        if (!mono_used[c.mono] && !bi_used[c.bi])
        {
            mono_used[c.mono] = bi_used[c.bi] = true;
            out.shared.emplace_back(c.mono, c.bi);
        }
    std::sort(out.shared.begin(), out.shared.end());
    for (std::size_t i = 0; i < mono.size(); ++i)
        if (!mono_used[i])
            out.mono_only.push_back(i);
    for (std::size_t j = 0; j < bi.size(); ++j)
        if (!bi_used[j] && bi[j])
            out.bi_only.push_back(j);
    return out;
}

} // namespace isac
