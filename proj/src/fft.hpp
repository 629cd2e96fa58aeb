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

#ifndef ISAC_DETAIL_FFT_HPP
#define ISAC_DETAIL_FFT_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace isac::detail
{

// Unscaled forward transform; the inverse carries the 1/N factor.
inline Eigen::VectorXcd fft(const Eigen::VectorXcd& x)
{
    Eigen::FFT<double> engine;
    std::vector<std::complex<double>> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> out;
    engine.fwd(out, in);
    return Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

inline Eigen::VectorXcd ifft(const Eigen::VectorXcd& x)
{
    Eigen::FFT<double> engine;
    std::vector<std::complex<double>> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> out;
    engine.inv(out, in);
    return Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

// y[n] = sum_k a[k] b[(n - k) mod N], both of length N.
inline Eigen::VectorXcd circular_convolve(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b)
{
    return ifft(fft(a).cwiseProduct(fft(b)));
}

// c[k] = sum_n y[n] conj(x[(n - k) mod N]).
inline Eigen::VectorXcd circular_correlate(const Eigen::VectorXcd& y, const Eigen::VectorXcd& x)
{
    return ifft(fft(y).cwiseProduct(fft(x).conjugate()));
}

} // namespace isac::detail

#endif // ISAC_DETAIL_FFT_HPP
