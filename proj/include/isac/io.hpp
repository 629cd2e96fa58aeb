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

#ifndef ISAC_IO_HPP
#define ISAC_IO_HPP

#include "isac/analysis.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace isac
{

// PADP grid as CSV: angle_deg,delay_ns,power_db, one row per cell in
// angle-major order. A zero-power cell has an empty power_db field.
void write_padp_csv(const Padp& padp, const std::filesystem::path& path);
Padp read_padp_csv(const std::filesystem::path& path);

// CIR path list as JSON (delays in s, angles in rad, amplitude as re/im).
std::string cir_to_json(const Cir& cir);
Cir cir_from_json(const std::string& text);
void write_cir_json(const Cir& cir, const std::filesystem::path& path);
Cir read_cir_json(const std::filesystem::path& path);

// Analysed path list: theta_deg, tau_s, power_db, bounce_order, origin,
// route_labels.
std::string peaks_to_json(const std::vector<PathPeak>& peaks);
std::vector<PathPeak> peaks_from_json(const std::string& text);

// Reconstruction scene as JSON.
std::string scene_to_json(const ReconstructionScene& scene);
ReconstructionScene scene_from_json(const std::string& text);
ReconstructionScene read_scene_json(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace isac

#endif // ISAC_IO_HPP
