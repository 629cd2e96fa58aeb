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


#include "generators.hpp"

#include "isac/background.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace isac;
using isac::testing::Gen;

namespace
{

struct Measured
{
    int position;
    const char* condition;
    double o_back;
};

// Measured PCF per position, transcribed independently of the library table.
constexpr Measured kMeasured[] = {
    {1, "los_los", 0.89},   {2, "los_los", 0.73},   {3, "los_los", 0.67},   {4, "los_los", 0.75},
    {5, "los_los", 0.84},   {6, "los_los", 0.81},   {7, "los_los", 0.86},   {8, "los_los", 0.78},
    {9, "los_los", 0.91},   {10, "los_los", 0.93},  {11, "los_nlos", 0.89}, {12, "los_nlos", 0.90},
    {13, "los_nlos", 0.92}, {14, "los_nlos", 0.95},
};

} // namespace

TEST_CASE("reference PCF table matches the measured values")
{
    const auto table = pcf_reference_table();
    REQUIRE(table.size() == std::size(kMeasured));
    for (std::size_t i = 0; i < table.size(); ++i)
    {
        CHECK(table[i].position == kMeasured[i].position);
        CHECK(std::string(to_string(table[i].condition)) == kMeasured[i].condition);
        CHECK(table[i].o_back == kMeasured[i].o_back);
    }
}

TEST_CASE("fixed PCF reproduces each measured value exactly")
{
    for (const auto& m : kMeasured)
        for (std::uint64_t seed : {0ULL, 1ULL, 99ULL})
            CHECK(sample_pcf(PcfModel::fixed(m.o_back, pcf_condition_from_string(m.condition)), seed) == m.o_back);
}

TEST_CASE("default PCF statistics are the table sample statistics")
{
    for (auto cond : {PcfCondition::los_los, PcfCondition::los_nlos})
    {
        std::vector<double> v;
        for (const auto& m : kMeasured)
            if (pcf_condition_from_string(m.condition) == cond)
                v.push_back(m.o_back);
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v)
            ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        const auto d = PcfModel::defaults(cond);
        CHECK(d.mean == doctest::Approx(mean).epsilon(1e-12));
        CHECK(d.stddev == doctest::Approx(sd).epsilon(1e-12));
    }
    CHECK(PcfModel::defaults(PcfCondition::los_los).mean == doctest::Approx(0.817));
    CHECK(PcfModel::defaults(PcfCondition::los_nlos).mean == doctest::Approx(0.915));
}

TEST_CASE("PCF sampling is deterministic, clamped and condition-separated")
{
    const auto los = PcfModel::defaults(PcfCondition::los_los);
    const auto nlos = PcfModel::defaults(PcfCondition::los_nlos);
    CHECK(sample_pcf(los, 5) == sample_pcf(los, 5));
    auto a = sample_pcf(los, 1, 10000);
    auto b = sample_pcf(nlos, 2, 10000);
    for (double x : a)
        CHECK((x >= los.clamp_min && x <= los.clamp_max));
    std::size_t wins = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        wins += b[i] > a[i];
    CHECK(wins > a.size() / 2);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (int q = 5; q <= 90; ++q)
    {
        const std::size_t k = a.size() * static_cast<std::size_t>(q) / 100;
        CHECK(b[k] >= a[k]);
    }

    PcfModel wide{PcfCondition::los_los, 1.4, 1.0};
    for (double x : sample_pcf(wide, 3, 2000))
        CHECK((x >= wide.clamp_min && x <= wide.clamp_max));
    PcfModel bad = los;
    bad.stddev = -0.1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("apply_pcf")
{
    CHECK(apply_pcf(3.7e-9, 1.0) == 3.7e-9);
    CHECK(linear_to_db(apply_pcf(1.0, 0.5)) == doctest::Approx(-3.0103).epsilon(1e-5));
    CHECK(apply_pcf(2e-7, 0.92) == doctest::Approx(0.92 * 2e-7).epsilon(1e-15));
    // dB path-loss domain: 80 dB loss scaled by 0.9 -> 72 dB
    CHECK(linear_to_db(apply_pcf(1e-8, 0.9, PcfDomain::db_pathloss)) == doctest::Approx(-72.0));
    CHECK(apply_pcf(1e-8, 1.0, PcfDomain::db_pathloss) == doctest::Approx(1e-8).epsilon(1e-12));

    Gen g(41);
    const Cir c = g.cir(20);
    const Cir same = apply_pcf(c, 1.0);
    for (std::size_t i = 0; i < c.paths.size(); ++i)
        CHECK(same.paths[i].amp == c.paths[i].amp);
}

TEST_CASE("property: scaled background power increases strictly with the PCF")
{
    Gen g(42);
    for (int i = 0; i < 200; ++i)
    {
        const Cir c = g.cir(static_cast<std::size_t>(g.integer(1, 30)));
        const double o1 = g.uniform(0.1, 1.4);
        const double o2 = o1 + g.uniform(1e-3, 0.1);
        CHECK(apply_pcf(c, o1).total_power() < apply_pcf(c, o2).total_power());
        CHECK(apply_pcf(c, o1).total_power() == doctest::Approx(o1 * c.total_power()).epsilon(1e-12));
    }
}

TEST_CASE("mono-static background")
{
    const std::vector<GeometricScatterer> one{{Eigen::Vector3d(15.0, 0.0, 0.0), 0.0, "wall"}};
    const Cir c = background_monostatic(one, Eigen::Vector3d::Zero(), 0.0107);
    REQUIRE(c.paths.size() == 1);
    // 2 * 15 / 299792458
    CHECK(c.paths[0].delay_s == doctest::Approx(100.069229e-9).epsilon(1e-8));
    CHECK(angular_distance(c.paths[0].aoa, c.paths[0].aod) == 0.0);
    CHECK(background_monostatic({}, Eigen::Vector3d::Zero(), 0.0107).paths.empty());
    const std::vector<GeometricScatterer> bad{{Eigen::Vector3d(1.0, 2.0, 3.0), 0.0, "node"}};
    CHECK_THROWS_AS(background_monostatic(bad, Eigen::Vector3d(1.0, 2.0, 3.0), 0.0107), ValidationError);
}

TEST_CASE("property: mono-static delay law and retro-direction")
{
    Gen g(43);
    for (int trial = 0; trial < 20; ++trial)
    {
        const Eigen::Vector3d node = g.point(5.0);
        std::vector<GeometricScatterer> s;
        for (int i = 0; i < 50; ++i)
        {
            Eigen::Vector3d p = node + g.point(40.0);
            if ((p - node).norm() < 0.5)
                continue;
            s.push_back({p, g.uniform(0.0, 30.0), "s"});
        }
        const Cir c = background_monostatic(s, node, 0.0107);
        REQUIRE(c.paths.size() == s.size());
        for (const auto& p : c.paths)
        {
            CHECK(p.aoa.azimuth == p.aod.azimuth);
            CHECK(p.aoa.elevation == p.aod.elevation);
            const double range = p.delay_s * kSpeedOfLight / 2.0;
            const Eigen::Vector3d at = node + range * unit_vector(p.aoa);
            double best = 1e9;
            for (const auto& sc : s)
                best = std::min(best, (sc.position - at).norm());
            CHECK(best < 1e-9);
        }
    }
}

TEST_CASE("bi-static backgrounds")
{
    GenerationProfile p;
    p.seed = 9;
    const auto omni = AntennaModel::omni();
    LinkContext link;
    link.wavelength_m = 0.0107;
    const Cir back = background_bistatic(p, omni, omni, link);
    const Cir comm = synthesize_cir(sample_clusters(p), omni, omni, link);
    REQUIRE(back.paths.size() == comm.paths.size());
    for (std::size_t i = 0; i < back.paths.size(); ++i)
    {
        CHECK(back.paths[i].amp == comm.paths[i].amp);
        CHECK(back.paths[i].origin == PathOrigin::background);
    }
    CHECK(back.total_power() == doctest::Approx(1.0).epsilon(1e-9));
    p.n_clusters = 0;
    CHECK_THROWS(background_bistatic(p, omni, omni, link));

    const std::vector<GeometricScatterer> s{{Eigen::Vector3d(3.0, 4.0, 0.0), 20.0, "pillar"}};
    const double lambda = 0.05;
    const Cir geo = background_geometric_bistatic(s, Eigen::Vector3d::Zero(), Eigen::Vector3d(6.0, 0.0, 0.0), lambda);
    REQUIRE(geo.paths.size() == 2);
    CHECK(geo.paths[0].delay_s == doctest::Approx(6.0 / kSpeedOfLight));
    CHECK(geo.paths[0].bounce_order == 0);
    CHECK(geo.paths[0].power() == doctest::Approx(std::pow(lambda / (4.0 * kPi * 6.0), 2)));
    CHECK(geo.paths[1].delay_s == doctest::Approx(10.0 / kSpeedOfLight));
    CHECK(geo.paths[1].power() ==
          doctest::Approx(std::pow(lambda / (4.0 * kPi * 5.0), 4) * 100.0).epsilon(1e-12));
    CHECK(geo.paths[1].aod.azimuth_deg() == doctest::Approx(53.1301).epsilon(1e-5));
    CHECK(background_geometric_bistatic(s, Eigen::Vector3d::Zero(), Eigen::Vector3d(6.0, 0.0, 0.0), lambda, false)
              .paths.size() == 1);
}
