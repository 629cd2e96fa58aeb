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


// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include "isac/analysis.hpp"
#include "isac/background.hpp"
#include "isac/io.hpp"
#include "isac/link_budget.hpp"
#include "isac/pipeline.hpp"
#include "isac/sounder.hpp"
#include "isac/target.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

using namespace isac;
namespace fs = std::filesystem;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

const double kLambda69 = kSpeedOfLight / 6.9e9;

struct TableRow
{
    const char* id;
    double p1, p2, sigma, conv, meas, delta;
};

// RIS concatenation table at 6.9 GHz, transcribed independently of data/golden.
constexpr TableRow kTable2[] = {
    {"1-A", -74.64, -78.46, 8.48, -106.39, -107.54, 1.15},  {"2-A", -70.21, -78.46, 9.04, -101.40, -106.14, 4.74},
    {"1-B", -74.64, -83.36, 14.19, -105.58, -112.18, 6.60}, {"2-B", -70.21, -83.36, 4.46, -110.88, -105.81, -5.07},
    {"1-C", -74.64, -93.28, 0.46, -128.94, -128.83, -0.11}, {"2-C", -70.21, -93.28, -6.33, -118.56, -113.47, -5.09},
    {"1-D", -74.64, -95.59, 0.75, -131.54, -132.19, 0.65},  {"2-D", -70.21, -95.59, 6.70, -133.90, -134.53, 0.63},
};

void ac1(Verdict& v)
{
    const auto t0 = Clock::now();
    double worst_tight = 0.0, worst_loose = 0.0;
    int ambiguous = 0;
    for (const auto& r : kTable2)
    {
        const std::string id = r.id;
        const double residual = std::abs(conv_path_power(r.p1, r.p2, r.sigma, kLambda69) - r.conv);
        if (id == "2-C" || id == "2-D")
        {
            // the flipped sign must explain the printed value
            const double flipped = std::abs(conv_path_power(r.p1, r.p2, -r.sigma, kLambda69) - r.conv);
            v.require(residual > 1.0 && flipped <= 0.4, id + " sign ambiguity");
            ++ambiguous;
        }
        else if (id == "1-C" || id == "1-D")
            worst_loose = std::max(worst_loose, residual);
        else
            worst_tight = std::max(worst_tight, residual);
    }
    const ValidationReport rep = run_validate(fs::path(ISAC_SOURCE_DIR) / "data" / "golden");
    int annotated = 0;
    for (const auto& row : rep.rows)
        annotated += row.table == "table2" && !row.gating && row.note.rfind("sign_ambiguous", 0) == 0;
    const double elapsed = seconds_since(t0);
    v.require(worst_tight <= 0.01, "A/B rows within 0.01 dB");
    v.require(worst_loose <= 0.4, "C/D rows of path 1 within 0.4 dB");
    v.require(annotated == 2, "2-C and 2-D carry the annotation");
    v.require(elapsed < 1.0, "runtime");
    v.detail << "max |res| A/B " << worst_tight << " dB, 1-C/1-D " << worst_loose << " dB, " << ambiguous
             << " sign-ambiguous rows annotated, " << elapsed << " s";
}

void ac2(Verdict& v)
{
    double worst = 0.0, max_abs = 0.0, min_abs = 1e300;
    for (const auto& r : kTable2)
    {
        const double dp = delta_p(r.conv, r.meas);
        worst = std::max(worst, std::abs(dp - r.delta));
        max_abs = std::max(max_abs, std::abs(dp));
        min_abs = std::min(min_abs, std::abs(dp));
    }
    v.require(worst <= 0.01, "dP within 0.01 dB");
    v.require(max_abs <= 7.0, "max |dP| <= 7 dB");
    v.require(std::abs(min_abs - 0.11) <= 1e-9, "min |dP| = 0.11 dB");
    v.detail << "max |res| " << worst << " dB, max |dP| " << max_abs << " dB, min |dP| " << min_abs << " dB";
}

void ac3(Verdict& v)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pl(20.0, 140.0), lam(1e-3, 0.5), sig(-40.0, 60.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
        const double pl1 = pl(rng), pl2 = pl(rng), lambda = lam(rng), sigma = sig(rng);
        worst = std::max(worst, std::abs(estimate_rcs(pl1, pl2, radar_pathloss(pl1, pl2, lambda, sigma), lambda) - sigma));
    }
    std::vector<RcsSample> flat;
    for (int i = 0; i < 50; ++i)
        flat.push_back({1.0 + 0.2 * i, 8.48});
    const LineFit fit = fit_rcs_line(flat);
    v.require(worst <= 1e-12, "inverse within 1e-12 dBsm");
    v.require(std::abs(fit.slope) < 1e-9, "flat fit slope");
    v.detail << "max inverse error " << worst << " dBsm over 1e4 points, flat-fit slope " << fit.slope << " dB/m";
}

SubLink random_sublink(std::mt19937_64& rng, SubLinkSide side, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> ns(0, 60);
    SubLink s;
    s.side = side;
    for (std::size_t i = 0; i < n; ++i)
    {
        Cluster c;
        c.power = 0.1 + 0.9 * u(rng);
        Ray r;
        r.delay_s = ns(rng) * 1e-9;
        r.aod = {2.0 * kPi * u(rng) - kPi, 0.0};
        r.aoa = {2.0 * kPi * u(rng) - kPi, 0.0};
        r.phases[0] = 2.0 * kPi * u(rng);
        c.rays.push_back(r);
        s.clusters.clusters.push_back(c);
    }
    s.clusters.normalize();
    return s;
}

// Dense integer-ns grid of one sub-link, co-polar amplitude per ray.
std::vector<cd> dense_grid(const SubLink& s, std::size_t n)
{
    std::vector<cd> g(n, cd(0.0, 0.0));
    for (const auto& c : s.clusters.clusters)
        for (const auto& r : c.rays)
            g[static_cast<std::size_t>(std::lround(r.delay_s * 1e9))] +=
                std::sqrt(c.power / static_cast<double>(c.rays.size())) * std::polar(1.0, r.phases[0]);
    return g;
}

void ac4(Verdict& v)
{
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> count(1, 20);
    const auto omni = AntennaModel::omni();
    LinkContext link;
    link.wavelength_m = kLambda69;
    ScatteringPoint sp;
    const double sigma_dbsm = 5.0;
    sp.rcs = RcsConstant{sigma_dbsm};
    const double scale = db_to_linear(sigma_dbsm) * 4.0 * kPi / (kLambda69 * kLambda69);
    Eigen::FFT<double> fft;
    double worst_power = 0.0, worst_bin = 0.0;
    bool delays_ok = true;
    const int trials = 200;
    for (int t = 0; t < trials; ++t)
    {
        const SubLink a = random_sublink(rng, SubLinkSide::tx_to_target, static_cast<std::size_t>(count(rng)));
        const SubLink b = random_sublink(rng, SubLinkSide::target_to_rx, static_cast<std::size_t>(count(rng)));
        const Cir c = concatenate(a, b, sp, omni, omni, link);

        const std::size_t n = 128;
        std::vector<cd> fa, fb, dense;
        fft.fwd(fa, dense_grid(a, n));
        fft.fwd(fb, dense_grid(b, n));
        for (std::size_t k = 0; k < n; ++k)
            fa[k] *= fb[k];
        fft.inv(dense, fa);

        std::vector<cd> sparse(n, cd(0.0, 0.0));
        for (const auto& p : c.paths)
            sparse[static_cast<std::size_t>(std::lround(p.delay_s * 1e9))] += p.amp;
        double p_dense = 0.0, p_sparse = 0.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            p_dense += std::norm(dense[k]) * scale;
            p_sparse += std::norm(sparse[k]);
            worst_bin = std::max(worst_bin, std::abs(sparse[k] - dense[k] * std::sqrt(scale)) / std::sqrt(scale));
        }
        worst_power = std::max(worst_power, std::abs(p_sparse - p_dense) / p_dense);

        std::multiset<double> expected, got;
        for (const auto& ca : a.clusters.clusters)
            for (const auto& cb : b.clusters.clusters)
                expected.insert(ca.rays[0].delay_s + cb.rays[0].delay_s);
        for (const auto& p : c.paths)
            got.insert(p.delay_s);
        delays_ok = delays_ok && got == expected;
    }
    std::mt19937_64 grid_rng(41);
    const std::size_t grid_paths = concatenate(random_sublink(grid_rng, SubLinkSide::tx_to_target, 4),
                                               random_sublink(grid_rng, SubLinkSide::target_to_rx, 15), sp, omni, omni,
                                               link)
                                       .paths.size();
    v.require(worst_power <= 1e-6, "total power vs FFT oracle");
    v.require(delays_ok, "delay-sum multiset");
    v.require(grid_paths == 60, "4 x 15 grid");
    v.detail << trials << " random pairs, max relative power error " << worst_power << ", max bin error "
             << worst_bin << ", 4x15 -> " << grid_paths << " paths";
}

// Human-target scene with two wall reflectors; Tx is the scanning node.
ReconstructionScene planted_scene()
{
    ReconstructionScene s;
    s.tx = {0.0, 0.0, 1.4};
    s.rx = {10.0, 0.0, 1.4};
    s.target = {5.0, 0.70887, 1.4};
    s.reflectors = {{Eigen::Vector3d(8.12412176, -1.0653, 1.4), 20.0, "south wall"},
                    {Eigen::Vector3d(-7.1207, 0.41504, 1.4), 30.0, "west wall"}};
    s.scan_side = ReconstructionScene::ScanSide::tx;
    return s;
}

double route_length(const std::vector<Eigen::Vector3d>& points)
{
    double d = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        d += (points[i] - points[i - 1]).norm();
    return d;
}

void ac5(Verdict& v)
{
    const ReconstructionScene s = planted_scene();
    const Eigen::Vector3d& south = s.reflectors[0].position;
    const Eigen::Vector3d& west = s.reflectors[1].position;
    const double az = rad_to_deg(std::atan2(s.target.y() - s.tx.y(), s.target.x() - s.tx.x()));
    // planted routes per order, all leaving Tx towards the target
    const std::vector<std::vector<std::vector<Eigen::Vector3d>>> routes = {
        {{s.tx, s.target, s.rx}},
        {{s.tx, s.target, south, s.rx}, {s.tx, s.target, west, s.rx}},
        {{s.tx, s.target, south, west, s.rx}, {s.tx, s.target, west, south, s.rx}},
    };
    const double expected[2][3] = {{18.9, 65.7, 15.4}, {0.0, 16.4, 83.6}};
    double worst = 0.0, worst_sum = 0.0;
    bool orders_ok = true;
    for (const auto& pct : expected)
    {
        std::vector<PathPeak> paths;
        for (int order = 0; order < 3; ++order)
        {
            if (pct[order] == 0.0)
                continue;
            const auto& list = routes[static_cast<std::size_t>(order)];
            for (const auto& route : list)
            {
                PathPeak p;
                p.angle_deg = az;
                p.delay_s = route_length(route) / kSpeedOfLight;
                p.power = pct[order] / 100.0 / static_cast<double>(list.size()) * 1e-9;
                const BounceClassification b = classify_bounce(p, s, 1e-12);
                orders_ok = orders_ok && b.order == order;
                p.bounce_order = b.order;
                p.route_labels = b.route_labels;
                paths.push_back(p);
            }
        }
        const PowerProportion pp = power_proportion(paths);
        const double got[3] = {100.0 * pp.pp0, 100.0 * pp.pp1, 100.0 * pp.pp2_plus};
        for (int k = 0; k < 3; ++k)
            worst = std::max(worst, std::abs(got[k] - pct[k]));
        worst_sum = std::max(worst_sum, std::abs(got[0] + got[1] + got[2] - 100.0));
    }
    v.require(orders_ok, "planted routes classified at their order");
    v.require(worst <= 1e-9, "proportions");
    v.require(worst_sum <= 1e-9, "column sums");
    v.detail << "(18.9, 65.7, 15.4)% and (0, 16.4, 83.6)% max error " << worst << " pct, sum error " << worst_sum;
}

void ac6(Verdict& v)
{
    bool exact = true;
    std::uint64_t seed = 0;
    for (const auto& e : pcf_reference_table())
        exact = exact && sample_pcf(PcfModel::fixed(e.o_back, e.condition), ++seed) == e.o_back;
    const double m_ll = PcfModel::defaults(PcfCondition::los_los).mean;
    const double m_ln = PcfModel::defaults(PcfCondition::los_nlos).mean;
    bool noop = true;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-15.0, 2.0);
    for (int i = 0; i < 1000; ++i)
    {
        const double p = std::pow(10.0, u(rng));
        noop = noop && apply_pcf(p, 1.0, PcfDomain::linear_power) == p && apply_pcf(p, 1.0, PcfDomain::db_pathloss) == p;
    }
    auto ll = sample_pcf(PcfModel::defaults(PcfCondition::los_los), 60, 10000);
    auto ln = sample_pcf(PcfModel::defaults(PcfCondition::los_nlos), 61, 10000);
    std::sort(ll.begin(), ll.end());
    std::sort(ln.begin(), ln.end());
    bool dominates = true;
    // the two normal CDFs cross near the 95.4% level, so dominance is
    // checked below it
    for (int q = 5; q <= 90; ++q)
    {
        const auto i = static_cast<std::size_t>(q * 100);
        dominates = dominates && ln[i] >= ll[i];
    }
    v.require(exact, "fixed draws reproduce the table");
    v.require(m_ll == 0.817 && m_ln == 0.915, "default means");
    v.require(noop, "apply_pcf(., 1) no-op");
    v.require(dominates, "LOS+NLOS quantiles dominate LOS+LOS");
    v.detail << pcf_reference_table().size() << " table values exact, means " << m_ll << " / " << m_ln
             << ", 5..90% quantiles dominate";
}

void ac7(Verdict& v)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    const Eigen::Vector3d node(1.0, -2.0, 1.5);
    std::vector<GeometricScatterer> scatterers;
    while (scatterers.size() < 100)
    {
        const Eigen::Vector3d p(u(rng), u(rng), u(rng) / 5.0);
        if ((p - node).norm() > 0.5)
            scatterers.push_back({p, 30.0, "s" + std::to_string(scatterers.size())});
    }
    const Cir c = background_monostatic(scatterers, node, wavelength(28e9));
    double worst = 0.0;
    bool angles = c.paths.size() == scatterers.size();
    std::vector<double> ranges;
    for (const auto& s : scatterers)
        ranges.push_back((s.position - node).norm());
    std::sort(ranges.begin(), ranges.end());
    std::vector<double> got;
    for (const auto& p : c.paths)
    {
        got.push_back(p.delay_s * kSpeedOfLight / 2.0);
        angles = angles && p.aoa.azimuth == p.aod.azimuth && p.aoa.elevation == p.aod.elevation;
    }
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < std::min(got.size(), ranges.size()); ++i)
        worst = std::max(worst, std::abs(got[i] - ranges[i]));
    v.require(worst <= 1e-9, "range");
    v.require(angles, "AoA == AoD");
    v.detail << "100 scatterers, max range error " << worst << " m";
}

void ac8(Verdict& v)
{
    const auto t0 = Clock::now();
    const int m = 11;
    const double chip = 1e9;
    const PnSequence pn = generate_pn(m, default_taps(m), chip);
    const int period = static_cast<int>(pn.period());
    SounderSettings hw;
    hw.system_response = Eigen::VectorXcd(3);
    hw.system_response << 1.0, 0.25, -0.1;
    Cir through;
    through.paths.push_back(PathComponent{});
    through.paths[0].amp = 1.0;
    int successes = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t)
    {
        std::mt19937_64 rng(static_cast<std::uint64_t>(8000 + t));
        std::uniform_int_distribution<int> bin(0, period - 1);
        std::uniform_real_distribution<double> db(-20.0, 0.0), ph(-kPi, kPi);
        std::vector<int> bins;
        while (bins.size() < 5)
        {
            const int b = bin(rng);
            bool ok = true;
            for (int o : bins)
                ok = ok && std::min(std::abs(o - b), period - std::abs(o - b)) >= 2;
            if (ok)
                bins.push_back(b);
        }
        Cir truth;
        for (int b : bins)
        {
            PathComponent p;
            p.delay_s = b / chip;
            p.amp = std::polar(std::sqrt(db_to_linear(db(rng))), ph(rng));
            truth.paths.push_back(p);
        }
        truth.sort();

        const auto seed = static_cast<std::uint64_t>(t);
        const Eigen::VectorXcd b2b = slide_correlate(transmit_through(through, pn, 60.0, seed + 100000, hw), pn);
        const Eigen::VectorXcd raw = slide_correlate(transmit_through(truth, pn, 30.0, seed, hw), pn);
        const Cir found = extract_cir(calibrate(raw, b2b, chip), 30.0);

        bool ok = found.paths.size() == truth.paths.size();
        for (const auto& p : truth.paths)
        {
            bool hit = false;
            for (const auto& q : found.paths)
                hit = hit || (std::abs(q.delay_s - p.delay_s) <= 1.0 / chip + 1e-15 &&
                              std::abs(linear_to_db(q.power() / p.power())) <= 0.5);
            ok = ok && hit;
        }
        successes += ok;
    }
    const double elapsed = seconds_since(t0);
    v.require(successes >= 99, "success rate");
    v.require(elapsed < 30.0, "runtime");
    v.detail << successes << "/" << trials << " recovered, " << elapsed << " s";
}

void ac9(Verdict& v)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0), g(0.1, 10.0);
    std::uniform_int_distribution<int> n(0, 12);
    double worst = 0.0;
    int trials = 0;
    while (trials < 1000)
    {
        std::vector<ScatteredPath> shared(static_cast<std::size_t>(n(rng))), other(static_cast<std::size_t>(n(rng)));
        if (shared.empty() && other.empty())
            continue;
        cd s(0.0, 0.0), all(0.0, 0.0);
        for (auto& p : shared)
        {
            p = {cd(u(rng), u(rng)), g(rng)};
            s += p.gain * p.scattering_gain;
        }
        all = s;
        for (auto& p : other)
        {
            p = {cd(u(rng), u(rng)), g(rng)};
            all += p.gain * p.scattering_gain;
        }
        const double direct = std::norm(s) / std::norm(all);
        worst = std::max(worst, std::abs(sharing_degree(shared, other) - direct) / std::max(1.0, direct));
        ++trials;
    }
    const std::vector<ScatteredPath> some{{cd(0.3, 0.1), 2.0}, {cd(-0.1, 0.4), 0.5}};
    const double none = sharing_degree({}, some);
    const double full = sharing_degree(some, {});
    v.require(worst <= 1e-12, "coherent evaluation");
    v.require(none == 0.0, "SD = 0 without shared paths");
    v.require(std::abs(full - 1.0) <= 1e-15, "SD = 1 without nonshared paths");
    v.detail << trials << " partitions, max error " << worst << ", limits " << none << " / " << full;
}

void ac10(Verdict& v)
{
    const fs::path source = ISAC_SOURCE_DIR;
    std::random_device rd;
    const fs::path scratch = fs::temp_directory_path() / ("isac_acceptance_" + std::to_string(rd()));
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(source / "scenarios"))
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    int identical = 0;
    for (const auto& f : files)
    {
        const ScenarioConfig c = load_config(f);
        const fs::path a = scratch / (c.name + "_a"), b = scratch / (c.name + "_b");
        run_simulate(c, a);
        run_simulate(c, b);
        const bool same = read_text_file(a / "manifest.json") == read_text_file(b / "manifest.json");
        v.require(same, c.name + " manifests differ");
        identical += same;
    }
    fs::remove_all(scratch);
    v.require(!files.empty(), "demo scenarios present");
    v.detail << identical << "/" << files.size() << " demo scenarios byte-identical";
}

} // namespace

int main()
{
    const auto t0 = Clock::now();
    const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria = {
        {"AC1 table arithmetic", ac1},   {"AC2 delta-P column", ac2},     {"AC3 radar inverse", ac3},
        {"AC4 concatenation law", ac4},  {"AC5 power proportion", ac5},   {"AC6 power control factor", ac6},
        {"AC7 mono-static geometry", ac7}, {"AC8 sounder round trip", ac8}, {"AC9 sharing degree", ac9},
        {"AC10 determinism", ac10},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria)
    {
        Verdict v;
        try
        {
            check(v);
        }
        catch (const std::exception& e)
        {
            v.pass = false;
            v.detail << " [exception: " << e.what() << "]";
        }
        failures += !v.pass;
        std::printf("%s  %-26s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.str().c_str());
    }
    std::printf("acceptance: %d/%zu passed in %.2f s\n", static_cast<int>(criteria.size()) - failures,
                criteria.size(), seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
