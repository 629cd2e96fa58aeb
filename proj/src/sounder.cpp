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

#include "isac/sounder.hpp"
#include "isac/random.hpp"

#include "fft.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <iterator>
#include <limits>

namespace isac
{

std::vector<int> default_taps(int m)
{
    switch (m)
    {
    case 2: return {2, 1};
    case 3: return {3, 1};
    case 4: return {4, 3};
    case 5: return {5, 3};
    case 6: return {6, 5};
    case 7: return {7, 6};
    case 8: return {8, 6, 5, 4};
    case 9: return {9, 5};
    case 10: return {10, 7};
    case 11: return {11, 9};
    case 12: return {12, 6, 4, 1};
    case 13: return {13, 4, 3, 1};
    case 14: return {14, 5, 3, 1};
    case 15: return {15, 14};
    case 16: return {16, 15, 13, 4};
    default: throw DomainError("default_taps: register length must be in [2, 16]");
    }
}

PnSequence generate_pn(int m, const std::vector<int>& taps, double chip_rate_hz)
{
    if (m < 2 || m > 24)
        throw DomainError("generate_pn: register length must be in [2, 24]");
    if (taps.empty() || std::find(taps.begin(), taps.end(), m) == taps.end())
        throw DomainError("generate_pn: taps must include the last stage m");
    for (int t : taps)
        if (t < 1 || t > m)
            throw DomainError("generate_pn: tap outside [1, m]");
    if (!(chip_rate_hz > 0.0))
        throw DomainError("generate_pn: chip rate must be positive");

    const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
    std::uint32_t feedback_mask = 0;
    for (int t : taps)
        feedback_mask |= std::uint32_t{1} << (t - 1);

    // stage k lives in bit k-1; output is the last stage
    const std::uint32_t initial = mask;
    std::uint32_t state = initial;
    const std::size_t period = (std::size_t{1} << m) - 1;
    PnSequence pn{m, taps, Eigen::VectorXd(static_cast<Eigen::Index>(period)), chip_rate_hz};
    for (std::size_t i = 0; i < period; ++i)
    {
        pn.chips(static_cast<Eigen::Index>(i)) = ((state >> (m - 1)) & 1u) ? 1.0 : -1.0;
        const std::uint32_t fb = static_cast<std::uint32_t>(std::popcount(state & feedback_mask) & 1);
        state = ((state << 1) | fb) & mask;
        if (state == initial && i + 1 < period)
            throw DomainError("generate_pn: taps are not primitive (period " + std::to_string(i + 1) + " < " +
                              std::to_string(period) + ")");
    }
    if (state != initial)
        throw DomainError("generate_pn: taps are not primitive");
    return pn;
}

Eigen::VectorXcd pn_waveform(const PnSequence& pn, std::size_t samples_per_chip)
{
    if (samples_per_chip == 0)
        throw DomainError("pn_waveform: samples_per_chip must be positive");
    const auto spc = static_cast<Eigen::Index>(samples_per_chip);
    Eigen::VectorXcd x(pn.chips.size() * spc);
    for (Eigen::Index i = 0; i < pn.chips.size(); ++i)
        x.segment(i * spc, spc).setConstant(pn.chips(i));
    return x;
}

CaptureRecord transmit_through(const Cir& cir, const PnSequence& pn, double snr_db, std::uint64_t seed,
                               const SounderSettings& settings)
{
    if (pn.period() == 0)
        throw ValidationError("transmit_through: empty PN sequence");
    if (settings.system_response.size() == 0)
        throw ValidationError("transmit_through: empty system response");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        throw DomainError("transmit_through: SNR must be finite or +inf");
    const Eigen::VectorXcd x = pn_waveform(pn, settings.samples_per_chip);
    const Eigen::Index n = x.size();
    if (settings.system_response.size() > n)
        throw ValidationError("transmit_through: system response longer than one period");

    CaptureRecord rec;
    rec.sample_rate_hz = pn.chip_rate_hz * static_cast<double>(settings.samples_per_chip);
    rec.snr_db = snr_db;
    rec.seed = seed;
    rec.pn_m = pn.m;
    rec.pn_taps = pn.taps;
    rec.chip_rate_hz = pn.chip_rate_hz;
    rec.samples_per_chip = settings.samples_per_chip;

    // channel taps at the sample rate
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(n);
    const double period_s = static_cast<double>(n) / rec.sample_rate_hz;
    for (const auto& p : cir.paths)
    {
        const double rel = p.delay_s - cir.t0_s;
        if (!(rel >= 0.0) || rel >= period_s)
            throw DomainError("transmit_through: path delay outside one PN period (ambiguous range)");
        const auto k = static_cast<Eigen::Index>(std::llround(rel * rec.sample_rate_hz)) % n;
        h(k) += p.amp;
    }
    Eigen::VectorXcd sys = Eigen::VectorXcd::Zero(n);
    sys.head(settings.system_response.size()) = settings.system_response;

    rec.samples = detail::circular_convolve(detail::circular_convolve(x, h), sys);

    if (std::isfinite(snr_db))
    {
        const double signal = rec.samples.squaredNorm() / static_cast<double>(n);
        const double sigma = std::sqrt(signal / db_to_linear(snr_db) / 2.0);
        Rng rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            rec.samples(i) += cd(sigma * re, sigma * im);
        }
    }
    return rec;
}

Eigen::VectorXcd slide_correlate(const CaptureRecord& capture, const PnSequence& reference)
{
    const Eigen::VectorXcd x = pn_waveform(reference, capture.samples_per_chip);
    if (x.size() != capture.samples.size())
        throw ValidationError("slide_correlate: capture length does not match the reference period");
    return detail::circular_correlate(capture.samples, x) / x.squaredNorm();
}

SampledCir calibrate(const Eigen::VectorXcd& raw, const Eigen::VectorXcd& b2b, double sample_rate_hz,
                     double floor_db)
{
    if (raw.size() != b2b.size() || raw.size() == 0)
        throw ValidationError("calibrate: raw and back-to-back estimates must have equal non-zero length");
    if (!(b2b.cwiseAbs().maxCoeff() > 0.0))
        throw DomainError("calibrate: back-to-back response is zero");
    const Eigen::VectorXcd r = detail::fft(raw);
    const Eigen::VectorXcd b = detail::fft(b2b);
    const double floor = b.cwiseAbs().maxCoeff() * std::pow(10.0, floor_db / 20.0);

    SampledCir out;
    out.sample_rate_hz = sample_rate_hz;
    Eigen::VectorXcd spectrum(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i)
    {
        if (std::abs(b(i)) >= floor)
            spectrum(i) = r(i) / b(i);
        else
        {
            spectrum(i) = r(i) * std::conj(b(i)) / (floor * floor);
            out.flagged_bins.push_back(static_cast<std::size_t>(i));
        }
    }
    out.taps = detail::ifft(spectrum);
    return out;
}

Cir extract_cir(const SampledCir& sampled, double threshold_db)
{
    if (!(threshold_db > 0.0))
        throw DomainError("extract_cir: threshold must be positive");
    if (!(sampled.sample_rate_hz > 0.0))
        throw DomainError("extract_cir: sample rate must be positive");
    Cir cir;
    const Eigen::Index n = sampled.taps.size();
    if (n == 0)
        return cir;
    const Eigen::VectorXd p = sampled.taps.cwiseAbs2();
    const double peak = p.maxCoeff();
    if (!(peak > 0.0))
        return cir;
    const double floor = peak * db_to_linear(-threshold_db);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double left = p((i + n - 1) % n);
        const double right = p((i + 1) % n);
        // plateau ties go to the earlier tap
        if (p(i) >= floor && p(i) > left && p(i) >= right)
        {
            PathComponent c;
            c.delay_s = static_cast<double>(i) / sampled.sample_rate_hz;
            c.amp = sampled.taps(i);
            cir.paths.push_back(c);
        }
    }
    return cir;
}

// ---- capture files ------------------------------------------------------

namespace
{

void put_le32(std::ostream& os, float v)
{
    const auto bits = std::bit_cast<std::uint32_t>(v);
    const std::array<char, 4> bytes{static_cast<char>(bits & 0xffu), static_cast<char>((bits >> 8) & 0xffu),
                                    static_cast<char>((bits >> 16) & 0xffu), static_cast<char>((bits >> 24) & 0xffu)};
    os.write(bytes.data(), 4);
}

float get_le32(const unsigned char* b)
{
    const std::uint32_t bits = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
                               (std::uint32_t{b[3]} << 24);
    return std::bit_cast<float>(bits);
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext)
{
    return std::filesystem::path(stem.string() + ext);
}

} // namespace

void write_capture(const CaptureRecord& capture, const std::filesystem::path& stem)
{
    std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
    if (!bin)
        throw std::runtime_error("write_capture: cannot open " + with_suffix(stem, ".bin").string());
    for (Eigen::Index i = 0; i < capture.samples.size(); ++i)
    {
        put_le32(bin, static_cast<float>(capture.samples(i).real()));
        put_le32(bin, static_cast<float>(capture.samples(i).imag()));
    }

    nlohmann::ordered_json meta;
    meta["format"] = "complex64-le-interleaved";
    meta["n_samples"] = capture.samples.size();
    meta["sample_rate_hz"] = capture.sample_rate_hz;
    meta["snr_db"] = std::isfinite(capture.snr_db) ? nlohmann::ordered_json(capture.snr_db) : nlohmann::ordered_json();
    meta["seed"] = capture.seed;
    meta["samples_per_chip"] = capture.samples_per_chip;
    meta["pn"] = {{"m", capture.pn_m}, {"taps", capture.pn_taps}, {"chip_rate_hz", capture.chip_rate_hz}};
    std::ofstream js(with_suffix(stem, ".json"));
    if (!js)
        throw std::runtime_error("write_capture: cannot open " + with_suffix(stem, ".json").string());
    js << meta.dump(2) << '\n';
}

CaptureRecord read_capture(const std::filesystem::path& stem)
{
    std::ifstream js(with_suffix(stem, ".json"));
    if (!js)
        throw std::runtime_error("read_capture: cannot open " + with_suffix(stem, ".json").string());
    const auto meta = nlohmann::json::parse(js);

    CaptureRecord rec;
    rec.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
    rec.snr_db = meta.at("snr_db").is_null() ? std::numeric_limits<double>::infinity() : meta.at("snr_db").get<double>();
    rec.seed = meta.at("seed").get<std::uint64_t>();
    rec.samples_per_chip = meta.at("samples_per_chip").get<std::size_t>();
    rec.pn_m = meta.at("pn").at("m").get<int>();
    rec.pn_taps = meta.at("pn").at("taps").get<std::vector<int>>();
    rec.chip_rate_hz = meta.at("pn").at("chip_rate_hz").get<double>();
    const auto n = meta.at("n_samples").get<Eigen::Index>();

    std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
    if (!bin)
        throw std::runtime_error("read_capture: cannot open " + with_suffix(stem, ".bin").string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
    if (static_cast<Eigen::Index>(bytes.size()) != 8 * n)
        throw ValidationError("read_capture: sample file size does not match the sidecar");
    rec.samples.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        rec.samples(i) = cd(get_le32(&bytes[static_cast<std::size_t>(8 * i)]),
                            get_le32(&bytes[static_cast<std::size_t>(8 * i + 4)]));
    return rec;
}

} // namespace isac
