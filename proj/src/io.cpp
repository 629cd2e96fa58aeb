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

#include "csv.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

namespace isac
{

using nlohmann::json;
using nlohmann::ordered_json;

namespace
{

ordered_json vec3_json(const Eigen::Vector3d& v)
{
    return ordered_json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vec3_from(const json& j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

} // namespace

// ---- text files ---------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

// ---- PADP CSV -----------------------------------------------------------

void write_padp_csv(const Padp& p, const std::filesystem::path& path)
{
    p.validate();
    std::ostringstream os;
    os << "angle_deg,delay_ns,power_db\n";
    for (Eigen::Index r = 0; r < p.power.rows(); ++r)
        for (Eigen::Index c = 0; c < p.power.cols(); ++c)
        {
            const double v = p.power(r, c);
            os << detail::format_double(p.angles_deg[static_cast<std::size_t>(r)]) << ','
               << detail::format_double(p.delays.delay_at(static_cast<std::size_t>(c)) * 1e9) << ',';
            if (v > 0.0)
                os << detail::format_double(linear_to_db(v));
            os << '\n';
        }
    write_text_file(path, os.str());
}

Padp read_padp_csv(const std::filesystem::path& path)
{
    const auto rows = detail::read_csv(path);
    if (rows.empty() || rows.front() != std::vector<std::string>{"angle_deg", "delay_ns", "power_db"})
        throw ValidationError(path.string() + ": expected header angle_deg,delay_ns,power_db");

    std::vector<double> angles;
    std::vector<double> delays_ns;
    std::vector<double> values;
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        const auto& f = rows[i];
        if (f.size() != 3)
            throw ValidationError(path.string() + ": row " + std::to_string(i) + " does not have three fields");
        const double a = detail::parse_double(f[0]);
        const double d = detail::parse_double(f[1]);
        values.push_back(f[2].empty() ? 0.0 : db_to_linear(detail::parse_double(f[2])));
        if (angles.empty() || angles.back() != a)
            angles.push_back(a);
        if (angles.size() == 1)
            delays_ns.push_back(d);
    }
    if (angles.empty() || delays_ns.empty() || values.size() != angles.size() * delays_ns.size())
        throw ValidationError(path.string() + ": rows do not form a complete angle x delay grid");

    Padp p;
    p.angles_deg = angles;
    p.delays.start_s = delays_ns.front() * 1e-9;
    p.delays.step_s = delays_ns.size() > 1 ? (delays_ns[1] - delays_ns[0]) * 1e-9 : 1e-9;
    p.delays.count = delays_ns.size();
    p.power.resize(static_cast<Eigen::Index>(angles.size()), static_cast<Eigen::Index>(delays_ns.size()));
    for (std::size_t r = 0; r < angles.size(); ++r)
        for (std::size_t c = 0; c < delays_ns.size(); ++c)
            p.power(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * delays_ns.size() + c];
    p.validate();
    return p;
}

// ---- CIR JSON -----------------------------------------------------------

std::string cir_to_json(const Cir& cir)
{
    ordered_json root;
    root["carrier_freq_hz"] = cir.carrier_freq_hz;
    root["t0_s"] = cir.t0_s;
    root["paths"] = ordered_json::array();
    for (const auto& p : cir.paths)
    {
        ordered_json j;
        j["delay_s"] = p.delay_s;
        j["amp_re"] = p.amp.real();
        j["amp_im"] = p.amp.imag();
        j["doppler_hz"] = p.doppler_hz;
        j["aod_az_rad"] = p.aod.azimuth;
        j["aod_el_rad"] = p.aod.elevation;
        j["aoa_az_rad"] = p.aoa.azimuth;
        j["aoa_el_rad"] = p.aoa.elevation;
        j["bounce_order"] = p.bounce_order;
        j["origin"] = to_string(p.origin);
        root["paths"].push_back(std::move(j));
    }
    return root.dump(1) + "\n";
}

Cir cir_from_json(const std::string& text)
{
    const json root = json::parse(text);
    Cir cir;
    cir.carrier_freq_hz = root.at("carrier_freq_hz").get<double>();
    cir.t0_s = root.at("t0_s").get<double>();
    for (const auto& j : root.at("paths"))
    {
        PathComponent p;
        p.delay_s = j.at("delay_s").get<double>();
        p.amp = {j.at("amp_re").get<double>(), j.at("amp_im").get<double>()};
        p.doppler_hz = j.at("doppler_hz").get<double>();
        p.aod = {j.at("aod_az_rad").get<double>(), j.at("aod_el_rad").get<double>()};
        p.aoa = {j.at("aoa_az_rad").get<double>(), j.at("aoa_el_rad").get<double>()};
        p.bounce_order = j.at("bounce_order").get<int>();
        p.origin = path_origin_from_string(j.at("origin").get<std::string>());
        cir.paths.push_back(p);
    }
    return cir;
}

void write_cir_json(const Cir& cir, const std::filesystem::path& path)
{
    write_text_file(path, cir_to_json(cir));
}

Cir read_cir_json(const std::filesystem::path& path)
{
    return cir_from_json(read_text_file(path));
}

// ---- analysed paths -----------------------------------------------------

std::string peaks_to_json(const std::vector<PathPeak>& peaks)
{
    ordered_json arr = ordered_json::array();
    for (const auto& p : peaks)
    {
        ordered_json j;
        j["theta_deg"] = p.angle_deg;
        j["tau_s"] = p.delay_s;
        j["power_db"] = p.power > 0.0 ? ordered_json(linear_to_db(p.power)) : ordered_json();
        j["bounce_order"] = p.bounce_order;
        j["origin"] = to_string(p.origin);
        j["route_labels"] = p.route_labels;
        arr.push_back(std::move(j));
    }
    return arr.dump(1);
}

std::vector<PathPeak> peaks_from_json(const std::string& text)
{
    std::vector<PathPeak> out;
    for (const auto& j : json::parse(text))
    {
        PathPeak p;
        p.angle_deg = j.at("theta_deg").get<double>();
        p.delay_s = j.at("tau_s").get<double>();
        p.power = j.at("power_db").is_null() ? 0.0 : db_to_linear(j.at("power_db").get<double>());
        p.bounce_order = j.at("bounce_order").get<int>();
        p.origin = path_origin_from_string(j.at("origin").get<std::string>());
        p.route_labels = j.at("route_labels").get<std::vector<std::string>>();
        out.push_back(std::move(p));
    }
    return out;
}

// ---- scene --------------------------------------------------------------

std::string scene_to_json(const ReconstructionScene& scene)
{
    ordered_json root;
    root["tx_m"] = vec3_json(scene.tx);
    root["rx_m"] = vec3_json(scene.rx);
    root["target_m"] = vec3_json(scene.target);
    root["beamwidth_deg"] = scene.beamwidth_deg;
    root["scan_side"] = scene.scan_side == ReconstructionScene::ScanSide::rx ? "rx" : "tx";
    root["reflectors"] = ordered_json::array();
    for (const auto& r : scene.reflectors)
        root["reflectors"].push_back(
            {{"label", r.label}, {"position_m", vec3_json(r.position)}, {"reflection_gain_db", r.reflection_gain_db}});
    return root.dump(1) + "\n";
}

ReconstructionScene scene_from_json(const std::string& text)
{
    const json root = json::parse(text);
    ReconstructionScene s;
    s.tx = vec3_from(root.at("tx_m"));
    s.rx = vec3_from(root.at("rx_m"));
    s.target = vec3_from(root.at("target_m"));
    s.beamwidth_deg = root.value("beamwidth_deg", 10.0);
    const std::string side = root.value("scan_side", std::string("rx"));
    if (side != "rx" && side != "tx")
        throw ValidationError("scene: scan_side must be 'rx' or 'tx'");
    s.scan_side = side == "rx" ? ReconstructionScene::ScanSide::rx : ReconstructionScene::ScanSide::tx;
    if (root.contains("reflectors"))
        for (const auto& r : root.at("reflectors"))
        {
            GeometricScatterer g;
            g.label = r.value("label", std::string());
            g.position = vec3_from(r.at("position_m"));
            g.reflection_gain_db = r.value("reflection_gain_db", 0.0);
            s.reflectors.push_back(std::move(g));
        }
    s.validate();
    return s;
}

ReconstructionScene read_scene_json(const std::filesystem::path& path)
{
    return scene_from_json(read_text_file(path));
}

// ---- hashing ------------------------------------------------------------

std::string sha256_file(const std::filesystem::path& path)
{
    const std::string bytes = read_text_file(path);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed for " + path.string());
    std::ostringstream os;
    for (unsigned int i = 0; i < length; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

} // namespace isac
