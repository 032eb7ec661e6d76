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

#include "lsdd/lsdd_core.hpp"

#include <algorithm>
#include <cmath>

#include "lsdd/error.hpp"

namespace lsdd {

namespace {

double norm2(std::span<const cdouble> a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return s;
}

double similarity_with_norms(std::span<const cdouble> a, double a_norm,
                             std::span<const cdouble> b, double b_norm) {
  cdouble dot{0.0, 0.0};
  for (std::size_t m = 0; m < a.size(); ++m) dot += a[m] * std::conj(b[m]);
  return std::clamp(std::abs(dot) / (a_norm * b_norm), 0.0, 1.0);
}

}  // namespace

double cosine_similarity(std::span<const cdouble> a, std::span<const cdouble> b) {
  if (a.size() != b.size()) throw ParameterError("vector lengths differ");
  const double na = std::sqrt(norm2(a));
  const double nb = std::sqrt(norm2(b));
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw DegenerateInputError("cosine similarity of a zero-norm vector");
  }
  return similarity_with_norms(a, na, b, nb);
}

std::optional<std::vector<double>> directional_spectrum(
    std::span<const cdouble> x_tf, const SteeringVectorSet& steering,
    std::size_t steering_freq) {
  if (x_tf.size() != steering.mic_count()) {
    throw ParameterError("snapshot length does not match microphone count");
  }
  const double nx = std::sqrt(norm2(x_tf));
  if (!(nx > 0.0)) return std::nullopt;
  std::vector<double> s(steering.directions());
  for (std::size_t l = 0; l < s.size(); ++l) {
    const auto v = steering.vector(l, steering_freq);
    s[l] = similarity_with_norms(x_tf, nx, v, std::sqrt(norm2(v)));
  }
  return s;
}

SpectrumTensor compute_spectrum(const StftTensor& tensor,
                                const SteeringVectorSet& steering,
                                const BandRange& band) {
  if (tensor.mic_count() != steering.mic_count()) {
    throw ParameterError("STFT has " + std::to_string(tensor.mic_count()) +
                         " channels but steering set has " +
                         std::to_string(steering.mic_count()) + " mics");
  }
  if (band.last >= tensor.bin_count()) throw BandError("band exceeds STFT bins");
  const double half_bin =
      0.5 * tensor.params.sample_rate_hz / static_cast<double>(tensor.params.nfft);
  const std::size_t frames = tensor.frame_count();
  const std::size_t bins = band.size();
  const std::size_t dirs = steering.directions();
  const std::size_t mics = tensor.mic_count();

  SpectrumTensor out{Tensor3<double>(frames, bins, dirs),
                     std::vector<std::uint8_t>(frames * bins, 0),
                     steering.grid(), band};
  std::vector<cdouble> x(mics);
  for (std::size_t fb = 0; fb < bins; ++fb) {
    const std::size_t f = band.first + fb;
    const std::size_t sf = steering.freq_index(tensor.bin_freqs_hz[f], half_bin);
    std::vector<double> v_norm(dirs);
    for (std::size_t l = 0; l < dirs; ++l) {
      v_norm[l] = std::sqrt(norm2(steering.vector(l, sf)));
    }
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t m = 0; m < mics; ++m) x[m] = tensor.values(m, t, f);
      const double nx = std::sqrt(norm2(x));
      if (!(nx > 0.0)) {
        out.degenerate[t * bins + fb] = 1;
        continue;
      }
      auto row = out.values.row(t, fb);
      for (std::size_t l = 0; l < dirs; ++l) {
        row[l] = similarity_with_norms(x, nx, steering.vector(l, sf), v_norm[l]);
      }
    }
  }
  return out;
}

SpectrumTensor smooth_spectrum(const SpectrumTensor& spectrum,
                               std::size_t frames_rt, std::size_t bins_rf) {
  if (frames_rt == 0 || bins_rf == 0 || frames_rt % 2 == 0 || bins_rf % 2 == 0) {
    throw ParameterError("smoothing window sizes must be odd and >= 1");
  }
  const std::size_t frames = spectrum.frames();
  const std::size_t bins = spectrum.bins();
  const std::size_t dirs = spectrum.directions();
  const auto rt = static_cast<std::ptrdiff_t>(frames_rt / 2);
  const auto rf = static_cast<std::ptrdiff_t>(bins_rf / 2);

  // Sum along frequency, then along time, tracking neighbor counts.
  Tensor3<double> by_freq(frames, bins, dirs);
  std::vector<double> count_freq(frames * bins, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t fb = 0; fb < bins; ++fb) {
      auto acc = by_freq.row(t, fb);
      const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(fb) - rf);
      const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(bins) - 1,
                                               static_cast<std::ptrdiff_t>(fb) + rf);
      for (auto j = lo; j <= hi; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (spectrum.is_degenerate(t, uj)) continue;
        count_freq[t * bins + fb] += 1.0;
        const auto src = spectrum.values.row(t, uj);
        for (std::size_t l = 0; l < dirs; ++l) acc[l] += src[l];
      }
    }
  }

  SpectrumTensor out{Tensor3<double>(frames, bins, dirs), spectrum.degenerate,
                     spectrum.grid, spectrum.band};
  for (std::size_t t = 0; t < frames; ++t) {
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(t) - rt);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(frames) - 1,
                                             static_cast<std::ptrdiff_t>(t) + rt);
    for (std::size_t fb = 0; fb < bins; ++fb) {
      auto acc = out.values.row(t, fb);
      double count = 0.0;
      for (auto i = lo; i <= hi; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        count += count_freq[ui * bins + fb];
        const auto src = by_freq.row(ui, fb);
        for (std::size_t l = 0; l < dirs; ++l) acc[l] += src[l];
      }
      if (count > 0.0) {
        for (auto& v : acc) v = std::min(v / count, 1.0);
      }
    }
  }
  return out;
}

std::vector<BinEstimate> estimate_bins(const SpectrumTensor& smoothed,
                                       double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("lambda must lie in [0, 1]");
  }
  std::vector<BinEstimate> out;
  out.reserve(smoothed.frames() * smoothed.bins());
  for (std::size_t t = 0; t < smoothed.frames(); ++t) {
    for (std::size_t fb = 0; fb < smoothed.bins(); ++fb) {
      if (smoothed.is_degenerate(t, fb)) continue;
      const auto row = smoothed.values.row(t, fb);
      // max_element returns the first maximum: lowest index wins ties.
      const auto best = std::max_element(row.begin(), row.end());
      BinEstimate e;
      e.t = t;
      e.f = smoothed.band.first + fb;
      e.direction = static_cast<std::size_t>(best - row.begin());
      e.phi_hat_deg = smoothed.grid[e.direction];
      e.theta_hat_deg = e.phi_hat_deg;
      e.xi = *best;
      e.valid = e.xi >= lambda;
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace lsdd
