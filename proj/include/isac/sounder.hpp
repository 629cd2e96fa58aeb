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

#ifndef ISAC_SOUNDER_HPP
#define ISAC_SOUNDER_HPP

#include "isac/core.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace isac
{

/// Maximal-length sequence from a Fibonacci LFSR, chips in {-1, +1}.
struct PnSequence
{
    int m = 0;
    std::vector<int> taps; // feedback stages, 1-based, e.g. {11, 9}
    Eigen::VectorXd chips;
    double chip_rate_hz = 1.0;

    std::size_t period() const { return static_cast<std::size_t>(chips.size()); }
};

/// Known primitive feedback taps for 2 <= m <= 16.
std::vector<int> default_taps(int m);

/// Throws DomainError when the taps do not produce period 2^m - 1.
PnSequence generate_pn(int m, const std::vector<int>& taps, double chip_rate_hz = 1.0);

struct SounderSettings
{
    std::size_t samples_per_chip = 1;                        // rectangular chips
    Eigen::VectorXcd system_response = Eigen::VectorXcd::Ones(1); // Tx+Rx hardware FIR at the sample rate
};

struct CaptureRecord
{
    Eigen::VectorXcd samples; // one PN period
    double sample_rate_hz = 0.0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    int pn_m = 0;
    std::vector<int> pn_taps;
    double chip_rate_hz = 0.0;
    std::size_t samples_per_chip = 1;
};

/// Cyclic (steady-state) reception of a periodic PN excitation: each path
/// is a circular shift by its delay rounded to the nearest sample, followed
/// by the system response and complex Gaussian noise at snr_db relative to
/// the mean received signal power. An infinite SNR disables noise.
CaptureRecord transmit_through(const Cir& cir, const PnSequence& pn, double snr_db, std::uint64_t seed,
                               const SounderSettings& settings = {});

/// Reference waveform at the capture sample rate.
Eigen::VectorXcd pn_waveform(const PnSequence& pn, std::size_t samples_per_chip);

/// Circular cross-correlation with the reference divided by its energy.
Eigen::VectorXcd slide_correlate(const CaptureRecord& capture, const PnSequence& reference);

struct SampledCir
{
    Eigen::VectorXcd taps;
    double sample_rate_hz = 0.0;
    std::vector<std::size_t> flagged_bins; // frequency bins under the floor
};

/// Frequency-domain division of the raw estimate by the back-to-back
/// estimate. Bins where |B| falls below floor_db (amplitude, relative to the
/// strongest bin) use the regularized R conj(B) / floor^2 and are flagged.
SampledCir calibrate(const Eigen::VectorXcd& raw, const Eigen::VectorXcd& b2b, double sample_rate_hz,
                     double floor_db = -40.0);

/// Taps that are local maxima within threshold_db of the strongest tap.
Cir extract_cir(const SampledCir& sampled, double threshold_db = 30.0);

/// Writes <stem>.bin (little-endian interleaved float32 I/Q) and
/// <stem>.json (sample_rate_hz, snr_db, seed, pn descriptor).
void write_capture(const CaptureRecord& capture, const std::filesystem::path& stem);
CaptureRecord read_capture(const std::filesystem::path& stem);

} // namespace isac

#endif // ISAC_SOUNDER_HPP
