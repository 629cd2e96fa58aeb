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

// isacsim: scenario simulation, analysis and validation front end.

#include "isac/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace
{

std::filesystem::path run_dir_for(const isac::ScenarioConfig& config, const std::string& out)
{
    if (!out.empty())
        return out;
    const std::filesystem::path rel = config.outputs.empty() ? config.name : config.outputs;
    return rel.is_absolute() ? rel : isac::default_output_root() / rel;
}

int simulate(const std::string& config_path, const std::string& out)
{
    const auto config = isac::load_config(config_path);
    const auto dir = run_dir_for(config, out);
    const auto report = isac::run_simulate(config, dir);
    std::cout << "run directory: " << dir.string() << "\nseed: " << report.seed << '\n';
    for (const auto& t : report.timings)
        std::printf("  %-20s %8.3f s\n", t.stage.c_str(), t.seconds);
    for (const auto& f : report.manifest)
        std::cout << "  " << f.sha256 << "  " << f.name << '\n';
    return 0;
}

int analyze(const std::string& run_dir, const std::string& scene)
{
    const auto result = isac::run_analyze(run_dir, scene.empty() ? std::nullopt : std::optional<std::filesystem::path>(scene));
    std::cout << result.paths.size() << " target path(s)\n";
    for (const auto& p : result.paths)
    {
        std::printf("  theta %7.2f deg  tau %9.3f ns  %8.2f dB  order %2d ", p.angle_deg, p.delay_s * 1e9,
                    isac::linear_to_db(p.power), p.bounce_order);
        for (std::size_t i = 0; i < p.route_labels.size(); ++i)
            std::cout << (i ? " -> " : "") << p.route_labels[i];
        std::cout << '\n';
    }
    if (result.proportion)
        std::printf("  PP0 %.1f%%  PP1 %.1f%%  PP2+ %.1f%%  (%zu unclassified)\n", 100.0 * result.proportion->pp0,
                    100.0 * result.proportion->pp1, 100.0 * result.proportion->pp2_plus,
                    result.proportion->unclassified);
    else
        std::cout << "  no classified paths\n";
    return 0;
}

int validate(const std::string& golden_dir)
{
    const auto report = isac::run_validate(golden_dir);
    for (const auto& r : report.rows)
    {
        const char* verdict = r.passed() ? "PASS" : (r.gating ? "FAIL" : "INFO");
        std::printf("%-4s %-6s %-12s %-22s expected %12.6g computed %12.6g residual %+.3g (tol %.3g)", verdict,
                    r.table.c_str(), r.id.c_str(), r.quantity.c_str(), r.expected, r.computed, r.residual(),
                    r.tolerance);
        if (!r.note.empty())
            std::cout << "  [" << r.note << ']';
        std::cout << '\n';
    }
    std::cout << (report.passed() ? "validation passed\n" : "validation FAILED\n");
    return report.passed() ? 0 : 1;
}

int roundtrip(const std::string& config_path, const std::string& out)
{
    const auto config = isac::load_config(config_path);
    const auto dir = run_dir_for(config, out);
    const auto r = isac::run_sounder_roundtrip(config, dir);
    std::cout << "paths above threshold: " << r.paths.size() << ", recovered " << r.recovered_count << ", spurious "
              << r.spurious_count << ", flagged calibration bins " << r.flagged_bins << '\n';
    for (const auto& p : r.paths)
    {
        std::printf("  %9.3f ns %8.2f dB -> ", p.true_delay_s * 1e9, p.true_power_db);
        if (p.recovered_delay_s)
            std::printf("%9.3f ns %8.2f dB\n", *p.recovered_delay_s * 1e9, *p.recovered_power_db);
        else
            std::printf("missed\n");
    }
    std::cout << (r.passed ? "round trip passed\n" : "round trip FAILED\n");
    return r.passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ISAC sensing-channel simulator and measurement-analysis toolkit"};
    app.require_subcommand(1);
    app.footer(std::string("Environment: ") + isac::kOutputRootEnv +
               " sets the default output root (default ./runs).");

    std::string config_path, run_dir, scene, golden_dir, out;

    auto* sim = app.add_subcommand("simulate", "Generate target and background channels and scanned PADPs");
    sim->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "Run directory (overrides the output root)");

    auto* ana = app.add_subcommand("analyze", "Extract, separate and classify target paths of a run");
    ana->add_option("run-dir", run_dir, "Directory written by simulate")->required()->check(CLI::ExistingDirectory);
    ana->add_option("--scene", scene, "Reconstruction scene JSON (default: <run-dir>/scene.json)")
        ->check(CLI::ExistingFile);

    auto* val = app.add_subcommand("validate", "Check the golden tables and report per-row residuals");
    val->add_option("golden-dir", golden_dir, "Directory with table2.csv, table3.csv, table4.csv")
        ->required()
        ->check(CLI::ExistingDirectory);

    auto* snd = app.add_subcommand("sounder-roundtrip", "Sound a scenario's channel with the PN sounder model");
    snd->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    snd->add_option("--out", out, "Run directory (overrides the output root)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sim)
            return simulate(config_path, out);
        if (*ana)
            return analyze(run_dir, scene);
        if (*val)
            return validate(golden_dir);
        if (*snd)
            return roundtrip(config_path, out);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
