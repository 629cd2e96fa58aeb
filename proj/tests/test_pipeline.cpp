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


#include "isac/io.hpp"
#include "isac/pipeline.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <random>

using namespace isac;
namespace fs = std::filesystem;

namespace
{

const fs::path kSource = ISAC_SOURCE_DIR;

// Scratch directory removed on scope exit.
struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("isac_" + tag + "_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

ScenarioConfig scenario(const std::string& file)
{
    return load_config(kSource / "scenarios" / file);
}

} // namespace

TEST_CASE("output root follows the environment")
{
    const char* saved = std::getenv(kOutputRootEnv);
    const std::string keep = saved ? saved : "";
    ::setenv(kOutputRootEnv, "/tmp/isac_root", 1);
    CHECK(default_output_root() == fs::path("/tmp/isac_root"));
    ::setenv(kOutputRootEnv, "", 1);
    CHECK(default_output_root() == fs::path("runs"));
    if (saved)
        ::setenv(kOutputRootEnv, keep.c_str(), 1);
    else
        ::unsetenv(kOutputRootEnv);
}

TEST_CASE("simulation is deterministic for a fixed seed")
{
    const ScenarioConfig c = scenario("scen1_metal_plate.json");
    TempDir a("det_a"), b("det_b");
    const RunReport ra = run_simulate(c, a.path);
    const RunReport rb = run_simulate(c, b.path);
    CHECK(read_text_file(a.path / "manifest.json") == read_text_file(b.path / "manifest.json"));
    REQUIRE(ra.manifest.size() == rb.manifest.size());
    for (std::size_t i = 0; i < ra.manifest.size(); ++i)
        CHECK(ra.manifest[i].sha256 == rb.manifest[i].sha256);
    for (const auto& f : ra.manifest)
        CHECK(sha256_file(a.path / f.name) == f.sha256);

    ScenarioConfig other = c;
    other.seed += 1;
    TempDir d("det_c");
    run_simulate(other, d.path);
    CHECK(read_text_file(a.path / "background.json") != read_text_file(d.path / "background.json"));
}

TEST_CASE("no targets gives an empty target channel")
{
    ScenarioConfig c = scenario("scen1_metal_plate.json");
    c.targets.clear();
    TempDir t("empty");
    run_simulate(c, t.path);
    CHECK(read_cir_json(t.path / "target.json").paths.empty());
    CHECK(!read_cir_json(t.path / "background.json").paths.empty());
}

TEST_CASE("concatenated path count is the product of the sub-link counts")
{
    for (const char* file : {"scen1_metal_plate.json", "scen2_ris.json", "scen3_human.json"})
    {
        CAPTURE(file);
        const Realization r = simulate(scenario(file));
        REQUIRE(r.counts.size() == 1);
        CHECK(r.counts[0].concatenated_paths == r.counts[0].tx_link_paths * r.counts[0].rx_link_paths);
        CHECK(r.target.paths.size() == r.counts[0].concatenated_paths);
    }
    const Realization s1 = simulate(scenario("scen1_metal_plate.json"));
    CHECK(s1.counts[0].tx_link_paths == 4);
    CHECK(s1.counts[0].rx_link_paths == 15);
}

TEST_CASE("written outputs read back")
{
    const ScenarioConfig c = scenario("scen2_ris.json");
    const Realization r = simulate(c);
    TempDir t("io");
    run_simulate(c, t.path);

    const Cir target = read_cir_json(t.path / "target.json");
    REQUIRE(target.paths.size() == r.target.paths.size());
    for (std::size_t i = 0; i < target.paths.size(); ++i)
    {
        CHECK(target.paths[i].delay_s == r.target.paths[i].delay_s);
        CHECK(target.paths[i].amp == r.target.paths[i].amp);
        CHECK(target.paths[i].bounce_order == r.target.paths[i].bounce_order);
    }

    const Padp padp = read_padp_csv(t.path / "padp.csv");
    REQUIRE(padp.power.rows() == r.sensing.power.rows());
    REQUIRE(padp.power.cols() == r.sensing.power.cols());
    CHECK(padp.angles_deg == r.sensing.angles_deg);
    for (Eigen::Index i = 0; i < padp.power.size(); ++i)
        CHECK(padp.power(i) == doctest::Approx(r.sensing.power(i)).epsilon(1e-12));

    const ReconstructionScene scene = read_scene_json(t.path / "scene.json");
    CHECK(scene.reflectors.size() == r.scene.reflectors.size());
    CHECK((scene.tx - r.scene.tx).norm() == 0.0);
}

TEST_CASE("analysis of a written run")
{
    TempDir t("analyze");
    run_simulate(scenario("scen2_ris.json"), t.path);
    const AnalysisResult a = run_analyze(t.path);
    CHECK(!a.paths.empty());
    CHECK(fs::exists(t.path / "paths.json"));
    const auto doc = nlohmann::json::parse(read_text_file(t.path / "paths.json"));
    const auto back = peaks_from_json(doc.at("paths").dump());
    CHECK(back.size() == a.paths.size());
    if (a.proportion)
        CHECK(a.proportion->pp0 + a.proportion->pp1 + a.proportion->pp2_plus == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(run_analyze(t.path / "missing"));
}

TEST_CASE("golden validation passes on the shipped tables")
{
    const ValidationReport rep = run_validate(kSource / "data" / "golden");
    CHECK(rep.passed());
    CHECK(rep.rows.size() > 20);
    std::size_t informational = 0;
    for (const auto& row : rep.rows)
        informational += !row.gating;
    CHECK(informational == 2);
}

TEST_CASE("a perturbed golden row fails alone")
{
    TempDir t("golden");
    for (const char* name : {"table2.csv", "table3.csv", "table4.csv"})
        fs::copy_file(kSource / "data" / "golden" / name, t.path / name);
    std::string text = read_text_file(t.path / "table2.csv");
    const std::string row = "1-A,-74.64,-78.46,8.48,-106.39,-107.54,1.15";
    const auto at = text.find(row);
    REQUIRE(at != std::string::npos);
    text.replace(at, row.size(), "1-A,-74.64,-78.46,8.48,-106.39,-107.04,1.15");
    write_text_file(t.path / "table2.csv", text);

    const ValidationReport rep = run_validate(t.path);
    CHECK(!rep.passed());
    std::vector<const ValidationRow*> failing;
    for (const auto& r : rep.rows)
        if (r.gating && !r.passed())
            failing.push_back(&r);
    REQUIRE(failing.size() == 1);
    CHECK(failing[0]->id == "1-A");
    CHECK(failing[0]->quantity == "delta_p_db");

    fs::remove(t.path / "table4.csv");
    CHECK_THROWS_AS(run_validate(t.path), ValidationError);
}

TEST_CASE("sounder round trip of a demo scenario")
{
    TempDir t("sound");
    const RoundtripResult r = run_sounder_roundtrip(scenario("scen2_ris.json"), t.path);
    CHECK(r.passed);
    CHECK(r.recovered_count == r.paths.size());
    CHECK(fs::exists(t.path / "capture.bin"));
    CHECK(fs::exists(t.path / "roundtrip.json"));
}

TEST_CASE("stage errors name the stage")
{
    ScenarioConfig c = scenario("scen1_metal_plate.json");
    c.targets[0].tx_link.profile.n_clusters = 0;
    try
    {
        simulate(c);
        FAIL("expected a StageError");
    }
    catch (const StageError& e)
    {
        CHECK(!e.stage().empty());
        CHECK(std::string(e.what()).find(e.stage()) != std::string::npos);
    }
}
