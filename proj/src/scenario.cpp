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

#include "isac/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace isac
{

namespace
{

using nlohmann::json;

// Walks a JSON document and records violations instead of throwing, so one
// load reports everything wrong with a file.
class Reader
{
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    void error(const std::string& where, const std::string& what) { errors_.push_back(where + ": " + what); }

    bool object(const json& j, const std::string& where)
    {
        if (!j.is_object())
        {
            error(where, "expected an object");
            return false;
        }
        return true;
    }

    void known_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
    {
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items())
            if (!keys.count(k))
                error(where, "unknown field '" + k + "'" + unit_hint(k));
    }

    double number(const json& j, const char* key, const std::string& where, std::optional<double> fallback)
    {
        if (!j.contains(key))
        {
            if (!fallback)
                error(where, std::string("missing required field '") + key + "'");
            return fallback.value_or(0.0);
        }
        const auto& v = j.at(key);
        if (!v.is_number())
        {
            error(where + "." + key, "expected a number");
            return fallback.value_or(0.0);
        }
        return v.get<double>();
    }

    std::string text(const json& j, const char* key, const std::string& where, std::optional<std::string> fallback)
    {
        if (!j.contains(key))
        {
            if (!fallback)
                error(where, std::string("missing required field '") + key + "'");
            return fallback.value_or("");
        }
        if (!j.at(key).is_string())
        {
            error(where + "." + key, "expected a string");
            return fallback.value_or("");
        }
        return j.at(key).get<std::string>();
    }

    bool boolean(const json& j, const char* key, const std::string& where, bool fallback)
    {
        if (!j.contains(key))
            return fallback;
        if (!j.at(key).is_boolean())
        {
            error(where + "." + key, "expected true or false");
            return fallback;
        }
        return j.at(key).get<bool>();
    }

    Eigen::Vector3d vec3(const json& j, const char* key, const std::string& where, bool required)
    {
        if (!j.contains(key))
        {
            if (required)
                error(where, std::string("missing required field '") + key + "'");
            return Eigen::Vector3d::Zero();
        }
        const auto& v = j.at(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
        {
            error(where + "." + key, "expected [x, y, z]");
            return Eigen::Vector3d::Zero();
        }
        return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }

private:
    static std::string unit_hint(const std::string& key)
    {
        static const std::pair<const char*, const char*> hints[] = {
            {"_ghz", "_hz"}, {"_mhz", "_hz"}, {"_khz", "_hz"}, {"_ns", "_s"}, {"_us", "_s"},
            {"_ms", "_s"},   {"_cm", "_m"},   {"_mm", "_m"},   {"_rad", "_deg"},
        };
        for (const auto& [bad, good] : hints)
        {
            const std::string b = bad;
            if (key.size() > b.size() && key.compare(key.size() - b.size(), b.size(), b) == 0)
                return " (fields use SI units: try '" + key.substr(0, key.size() - b.size()) + good + "')";
        }
        return "";
    }

    std::vector<std::string>& errors_;
};

AntennaModel read_antenna(Reader& rd, const json& j, const std::string& where)
{
    if (!rd.object(j, where))
        return AntennaModel::omni();
    rd.known_keys(j, where, {"kind", "hpbw_deg", "peak_gain_db", "boresight_az_deg", "boresight_el_deg"});
    const std::string kind = rd.text(j, "kind", where, "omni");
    if (kind == "omni")
        return AntennaModel::omni();
    if (kind != "horn")
    {
        rd.error(where + ".kind", "expected 'omni' or 'horn'");
        return AntennaModel::omni();
    }
    const double hpbw = rd.number(j, "hpbw_deg", where, std::nullopt);
    const double gain = rd.number(j, "peak_gain_db", where, 0.0);
    const double az = rd.number(j, "boresight_az_deg", where, 0.0);
    const double el = rd.number(j, "boresight_el_deg", where, 0.0);
    if (!(hpbw > 0.0))
    {
        rd.error(where + ".hpbw_deg", "must be positive");
        return AntennaModel::omni();
    }
    if (std::abs(el) > 90.0)
    {
        rd.error(where + ".boresight_el_deg", "must lie in [-90, 90]");
        return AntennaModel::omni();
    }
    return AntennaModel::horn(hpbw, gain, Angle3D::from_degrees(az, el));
}

NodeConfig read_node(Reader& rd, const json& j, const std::string& where)
{
    NodeConfig n;
    if (!rd.object(j, where))
        return n;
    rd.known_keys(j, where, {"position_m", "antenna"});
    n.position_m = rd.vec3(j, "position_m", where, true);
    if (j.contains("antenna"))
        n.antenna = read_antenna(rd, j.at("antenna"), where + ".antenna");
    return n;
}

GenerationProfile read_profile(Reader& rd, const json& j, const std::string& where,
                               std::initializer_list<const char*> extra_keys)
{
    std::vector<const char*> keys = {"n_clusters",           "rays_per_cluster",  "delay_scale_s",
                                     "per_ray_delays",       "ray_delay_scale_s", "angle_spread_deg",
                                     "ray_angle_spread_deg", "elevation_spread_deg", "xpr_mean_db",
                                     "xpr_std_db",           "shadowing_std_db",  "max_doppler_hz",
                                     "los"};
    keys.insert(keys.end(), extra_keys.begin(), extra_keys.end());
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k))
            rd.error(where, "unknown field '" + k + "'");

    GenerationProfile p;
    const auto count = [&](const char* key, std::size_t fallback) {
        const double v = rd.number(j, key, where, static_cast<double>(fallback));
        if (!(v >= 1.0) || v != std::floor(v))
        {
            rd.error(where + "." + key, "must be a positive integer");
            return fallback;
        }
        return static_cast<std::size_t>(v);
    };
    p.n_clusters = count("n_clusters", p.n_clusters);
    p.rays_per_cluster = count("rays_per_cluster", p.rays_per_cluster);
    p.delay_scale_s = rd.number(j, "delay_scale_s", where, p.delay_scale_s);
    p.per_ray_delays = rd.boolean(j, "per_ray_delays", where, p.per_ray_delays);
    p.ray_delay_scale_s = rd.number(j, "ray_delay_scale_s", where, p.ray_delay_scale_s);
    p.angle_spread_rad = deg_to_rad(rd.number(j, "angle_spread_deg", where, rad_to_deg(p.angle_spread_rad)));
    p.ray_angle_spread_rad =
        deg_to_rad(rd.number(j, "ray_angle_spread_deg", where, rad_to_deg(p.ray_angle_spread_rad)));
    p.elevation_spread_rad =
        deg_to_rad(rd.number(j, "elevation_spread_deg", where, rad_to_deg(p.elevation_spread_rad)));
    p.xpr_mean_db = rd.number(j, "xpr_mean_db", where, p.xpr_mean_db);
    p.xpr_std_db = rd.number(j, "xpr_std_db", where, p.xpr_std_db);
    p.shadowing_std_db = rd.number(j, "shadowing_std_db", where, p.shadowing_std_db);
    p.max_doppler_hz = rd.number(j, "max_doppler_hz", where, p.max_doppler_hz);
    p.los = rd.boolean(j, "los", where, p.los);
    try
    {
        p.validate();
    }
    catch (const std::exception& e)
    {
        rd.error(where, e.what());
    }
    return p;
}

SubLinkConfig read_sublink(Reader& rd, const json& j, const std::string& where)
{
    SubLinkConfig s;
    if (!rd.object(j, where))
        return s;
    const std::string mode = rd.text(j, "mode", where, "statistical");
    if (mode == "geometric")
    {
        s.mode = SubLinkConfig::Mode::geometric;
        rd.known_keys(j, where, {"mode"});
    }
    else if (mode == "statistical")
    {
        s.profile = read_profile(rd, j, where, {"mode"});
        // a target sub-link keeps its direct ray unless told otherwise
        s.profile.los = rd.boolean(j, "los", where, true);
    }
    else
        rd.error(where + ".mode", "expected 'statistical' or 'geometric'");
    return s;
}

RcsModel read_rcs(Reader& rd, const json& j, const std::string& where, const std::filesystem::path& base_dir)
{
    if (!rd.object(j, where))
        return RcsConstant{};
    const std::string kind = rd.text(j, "kind", where, "constant");
    if (kind == "constant")
    {
        rd.known_keys(j, where, {"kind", "sigma_dbsm"});
        return RcsConstant{rd.number(j, "sigma_dbsm", where, std::nullopt)};
    }
    if (kind == "cosine_lobe")
    {
        rd.known_keys(j, where, {"kind", "sigma_dbsm", "exponent"});
        const double s = rd.number(j, "sigma_dbsm", where, std::nullopt);
        const double e = rd.number(j, "exponent", where, 1.0);
        if (!(e >= 0.0))
            rd.error(where + ".exponent", "must be non-negative");
        return RcsCosineLobe{s, e};
    }
    if (kind == "table")
    {
        rd.known_keys(j, where, {"kind", "path"});
        const std::string rel = rd.text(j, "path", where, std::nullopt);
        try
        {
            return RcsTable::load_csv(base_dir / rel);
        }
        catch (const std::exception& e)
        {
            rd.error(where + ".path", e.what());
            return RcsConstant{};
        }
    }
    rd.error(where + ".kind", "expected 'constant', 'cosine_lobe' or 'table'");
    return RcsConstant{};
}

PolarimetricAmplitude read_cpm(Reader& rd, const json& j, const std::string& where)
{
    if (!rd.object(j, where))
        return PolarimetricAmplitude::Identity();
    rd.known_keys(j, where, {"xpr_db", "phases_deg"});
    const double xpr_db = j.contains("xpr_db") && j.at("xpr_db").is_null()
                              ? std::numeric_limits<double>::infinity()
                              : rd.number(j, "xpr_db", where, std::numeric_limits<double>::infinity());
    std::array<double, 4> phases{};
    if (j.contains("phases_deg"))
    {
        const auto& v = j.at("phases_deg");
        if (!v.is_array() || v.size() != 4)
            rd.error(where + ".phases_deg", "expected four phases [tt, tp, pt, pp]");
        else
            for (std::size_t i = 0; i < 4; ++i)
                phases[i] = v[i].is_number() ? deg_to_rad(v[i].get<double>()) : 0.0;
    }
    return cpm(db_to_linear(xpr_db), phases);
}

std::vector<GeometricScatterer> read_scatterers(Reader& rd, const json& j, const std::string& where)
{
    std::vector<GeometricScatterer> out;
    if (!j.is_array())
    {
        rd.error(where, "expected a list");
        return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        const std::string w = where + "[" + std::to_string(i) + "]";
        if (!rd.object(j[i], w))
            continue;
        rd.known_keys(j[i], w, {"position_m", "reflection_gain_db", "label"});
        GeometricScatterer s;
        s.position = rd.vec3(j[i], "position_m", w, true);
        s.reflection_gain_db = rd.number(j[i], "reflection_gain_db", w, 0.0);
        s.label = rd.text(j[i], "label", w, "scatterer " + std::to_string(i));
        out.push_back(s);
    }
    return out;
}

PathLossModel read_path_loss(Reader& rd, const json& j, const std::string& where, double f)
{
    if (!rd.object(j, where))
        return PathLossModel::free_space(f);
    const std::string kind = rd.text(j, "kind", where, "free_space");
    if (kind == "free_space")
    {
        rd.known_keys(j, where, {"kind"});
        return PathLossModel::free_space(f);
    }
    if (kind == "abg")
    {
        rd.known_keys(j, where, {"kind", "alpha", "beta", "gamma"});
        return PathLossModel::abg(rd.number(j, "alpha", where, std::nullopt), rd.number(j, "beta", where, std::nullopt),
                                  rd.number(j, "gamma", where, std::nullopt), f);
    }
    if (kind == "table")
    {
        rd.known_keys(j, where, {"kind", "distance_m", "loss_db"});
        try
        {
            return PathLossModel::table(j.at("distance_m").get<std::vector<double>>(),
                                        j.at("loss_db").get<std::vector<double>>(), f);
        }
        catch (const std::exception& e)
        {
            rd.error(where, e.what());
            return PathLossModel::free_space(f);
        }
    }
    rd.error(where + ".kind", "expected 'free_space', 'abg' or 'table'");
    return PathLossModel::free_space(f);
}

PcfModel read_pcf(Reader& rd, const json& j, const std::string& where)
{
    if (!rd.object(j, where))
        return PcfModel::fixed(1.0);
    rd.known_keys(j, where, {"condition", "mean", "std", "fixed", "clamp_min", "clamp_max"});
    PcfCondition condition = PcfCondition::los_los;
    if (j.contains("condition"))
    {
        try
        {
            condition = pcf_condition_from_string(rd.text(j, "condition", where, "los_los"));
        }
        catch (const std::exception& e)
        {
            rd.error(where + ".condition", e.what());
        }
    }
    PcfModel m = PcfModel::fixed(1.0, condition);
    if (j.contains("fixed"))
        m = PcfModel::fixed(rd.number(j, "fixed", where, 1.0), condition);
    else if (j.contains("condition") && !j.contains("mean"))
        m = PcfModel::defaults(condition);
    m.mean = rd.number(j, "mean", where, m.mean);
    m.stddev = rd.number(j, "std", where, m.stddev);
    m.clamp_min = rd.number(j, "clamp_min", where, m.clamp_min);
    m.clamp_max = rd.number(j, "clamp_max", where, m.clamp_max);
    try
    {
        m.validate();
    }
    catch (const std::exception& e)
    {
        rd.error(where, e.what());
    }
    return m;
}

ScenarioConfig parse(const json& root, const std::filesystem::path& base_dir)
{
    std::vector<std::string> errors;
    Reader rd(errors);
    ScenarioConfig c;
    if (!rd.object(root, "config"))
        throw ConfigError(errors);

    rd.known_keys(root, "config",
                  {"name", "carrier_freq_hz", "bandwidth_hz", "sensing_mode", "seed", "time_s", "outputs", "tx", "rx",
                   "path_loss", "targets", "background", "pcf", "pcf_domain", "scan", "sounder"});
    c.name = rd.text(root, "name", "config", std::nullopt);
    c.carrier_freq_hz = rd.number(root, "carrier_freq_hz", "config", std::nullopt);
    c.bandwidth_hz = rd.number(root, "bandwidth_hz", "config", std::nullopt);
    const std::string mode = rd.text(root, "sensing_mode", "config", std::nullopt);
    if (mode == "mono_static")
        c.sensing_mode = SensingMode::mono_static;
    else if (mode == "bi_static")
        c.sensing_mode = SensingMode::bi_static;
    else if (!mode.empty())
        rd.error("config.sensing_mode", "expected 'mono_static' or 'bi_static'");

    if (root.contains("seed"))
    {
        if (root.at("seed").is_number_unsigned())
            c.seed = root.at("seed").get<std::uint64_t>();
        else
            rd.error("config.seed", "expected a non-negative integer");
    }
    c.time_s = rd.number(root, "time_s", "config", 0.0);
    c.outputs = rd.text(root, "outputs", "config", c.name);

    if (root.contains("tx"))
        c.tx = read_node(rd, root.at("tx"), "config.tx");
    else
        rd.error("config", "missing required field 'tx'");
    if (root.contains("rx"))
        c.rx = read_node(rd, root.at("rx"), "config.rx");
    else
        rd.error("config", "missing required field 'rx'");

    c.path_loss = root.contains("path_loss") ? read_path_loss(rd, root.at("path_loss"), "config.path_loss", c.carrier_freq_hz)
                                             : PathLossModel::free_space(c.carrier_freq_hz);

    if (root.contains("background"))
    {
        const auto& b = root.at("background");
        const std::string where = "config.background";
        if (rd.object(b, where))
        {
            const std::string bm = rd.text(b, "mode", where, "statistical");
            if (bm == "statistical")
            {
                c.background.mode = BackgroundConfig::Mode::statistical;
                c.background.profile = read_profile(rd, b, where, {"mode"});
            }
            else if (bm == "geometric")
            {
                c.background.mode = BackgroundConfig::Mode::geometric;
                rd.known_keys(b, where, {"mode", "scatterers", "include_los"});
                if (b.contains("scatterers"))
                    c.background.scatterers = read_scatterers(rd, b.at("scatterers"), where + ".scatterers");
                c.background.include_los = rd.boolean(b, "include_los", where, true);
            }
            else
                rd.error(where + ".mode", "expected 'statistical' or 'geometric'");
        }
    }

    if (root.contains("targets"))
    {
        const auto& ts = root.at("targets");
        if (!ts.is_array())
            rd.error("config.targets", "expected a list");
        else
            for (std::size_t i = 0; i < ts.size(); ++i)
            {
                const std::string w = "config.targets[" + std::to_string(i) + "]";
                if (!rd.object(ts[i], w))
                    continue;
                rd.known_keys(ts[i], w, {"position_m", "velocity_mps", "rcs", "cpm", "tx_link", "rx_link"});
                TargetConfig t;
                t.position_m = rd.vec3(ts[i], "position_m", w, true);
                t.velocity_mps = rd.vec3(ts[i], "velocity_mps", w, false);
                if (ts[i].contains("rcs"))
                    t.rcs = read_rcs(rd, ts[i].at("rcs"), w + ".rcs", base_dir);
                else
                    rd.error(w, "missing required field 'rcs'");
                if (ts[i].contains("cpm"))
                    t.cpm = read_cpm(rd, ts[i].at("cpm"), w + ".cpm");
                t.tx_link = ts[i].contains("tx_link") ? read_sublink(rd, ts[i].at("tx_link"), w + ".tx_link")
                                                      : SubLinkConfig{SubLinkConfig::Mode::geometric, {}};
                t.rx_link = ts[i].contains("rx_link") ? read_sublink(rd, ts[i].at("rx_link"), w + ".rx_link")
                                                      : SubLinkConfig{SubLinkConfig::Mode::geometric, {}};
                c.targets.push_back(std::move(t));
            }
    }

    c.pcf = root.contains("pcf") ? read_pcf(rd, root.at("pcf"), "config.pcf") : PcfModel::fixed(1.0);
    if (root.contains("pcf_domain"))
    {
        try
        {
            c.pcf_domain = pcf_domain_from_string(rd.text(root, "pcf_domain", "config", "linear_power"));
        }
        catch (const std::exception& e)
        {
            rd.error("config.pcf_domain", e.what());
        }
    }

    if (root.contains("scan"))
    {
        const auto& s = root.at("scan");
        if (rd.object(s, "config.scan"))
        {
            rd.known_keys(s, "config.scan", {"start_deg", "stop_deg", "step_deg", "side"});
            c.scan.start_deg = rd.number(s, "start_deg", "config.scan", 0.0);
            c.scan.stop_deg = rd.number(s, "stop_deg", "config.scan", 360.0);
            c.scan.step_deg = rd.number(s, "step_deg", "config.scan", 5.0);
            const std::string side = rd.text(s, "side", "config.scan", "rx");
            if (side == "rx")
                c.scan.side = ReconstructionScene::ScanSide::rx;
            else if (side == "tx")
                c.scan.side = ReconstructionScene::ScanSide::tx;
            else
                rd.error("config.scan.side", "expected 'rx' or 'tx'");
        }
    }

    if (root.contains("sounder"))
    {
        const auto& s = root.at("sounder");
        if (rd.object(s, "config.sounder"))
        {
            rd.known_keys(s, "config.sounder", {"m", "snr_db", "samples_per_chip", "threshold_db"});
            c.sounder.m = static_cast<int>(rd.number(s, "m", "config.sounder", 11));
            c.sounder.snr_db = rd.number(s, "snr_db", "config.sounder", 30.0);
            const double spc = rd.number(s, "samples_per_chip", "config.sounder", 1.0);
            if (!(spc >= 1.0) || spc != std::floor(spc))
                rd.error("config.sounder.samples_per_chip", "must be a positive integer");
            else
                c.sounder.samples_per_chip = static_cast<std::size_t>(spc);
            c.sounder.threshold_db = rd.number(s, "threshold_db", "config.sounder", 30.0);
        }
    }

    for (auto& e : check_config(c))
        errors.push_back(std::move(e));
    if (!errors.empty())
        throw ConfigError(errors);
    return c;
}

std::string join(const std::vector<std::string>& items)
{
    std::ostringstream os;
    os << items.size() << " configuration error" << (items.size() == 1 ? "" : "s") << ":";
    for (const auto& s : items)
        os << "\n  - " << s;
    return os.str();
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : ValidationError(join(violations)), violations_(std::move(violations))
{
}

const char* to_string(SensingMode mode)
{
    return mode == SensingMode::mono_static ? "mono_static" : "bi_static";
}

std::vector<std::string> check_config(const ScenarioConfig& c)
{
    std::vector<std::string> v;
    if (!(c.carrier_freq_hz > 0.0) || !std::isfinite(c.carrier_freq_hz))
        v.push_back("config.carrier_freq_hz: must be positive");
    if (!(c.bandwidth_hz > 0.0) || !std::isfinite(c.bandwidth_hz))
        v.push_back("config.bandwidth_hz: must be positive");
    if (c.name.empty())
        v.push_back("config.name: must not be empty");
    if (c.sensing_mode == SensingMode::mono_static && c.tx.position_m != c.rx.position_m)
        v.push_back("config: mono_static requires tx.position_m == rx.position_m");
    if (c.sensing_mode == SensingMode::mono_static && c.background.mode == BackgroundConfig::Mode::statistical)
        v.push_back("config.background: mono_static sensing needs a geometric background (scatterer list)");
    if (c.sensing_mode == SensingMode::bi_static && c.tx.position_m == c.rx.position_m)
        v.push_back("config: bi_static requires distinct tx and rx positions");
    try
    {
        ScanGrid::angles(c.scan.start_deg, c.scan.stop_deg, c.scan.step_deg);
        if (c.scan.stop_deg - c.scan.start_deg > 360.0 + 1e-9)
            v.push_back("config.scan: range exceeds 360 degrees");
    }
    catch (const std::exception& e)
    {
        v.push_back(std::string("config.scan: ") + e.what());
    }
    for (std::size_t i = 0; i < c.targets.size(); ++i)
    {
        const auto& t = c.targets[i];
        if ((t.position_m - c.tx.position_m).norm() < 1e-9 || (t.position_m - c.rx.position_m).norm() < 1e-9)
            v.push_back("config.targets[" + std::to_string(i) + "]: target coincides with a node");
    }
    if (c.background.mode == BackgroundConfig::Mode::geometric)
        for (const auto& s : c.background.scatterers)
            if ((s.position - c.tx.position_m).norm() < 1e-9 || (s.position - c.rx.position_m).norm() < 1e-9)
                v.push_back("config.background: scatterer '" + s.label + "' coincides with a node");
    if (c.sounder.m < 2 || c.sounder.m > 16)
        v.push_back("config.sounder.m: must lie in [2, 16]");
    return v;
}

ScenarioConfig parse_config(const std::string& json_text)
{
    json root;
    try
    {
        root = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError({std::string("config: invalid JSON: ") + e.what()});
    }
    return parse(root, std::filesystem::current_path());
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({"config: cannot open '" + path.string() + "'"});
    json root;
    try
    {
        root = json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError({"config: invalid JSON in '" + path.string() + "': " + e.what()});
    }
    return parse(root, path.parent_path());
}

} // namespace isac
