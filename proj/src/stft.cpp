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

#include "lsdd/stft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "lsdd/angles.hpp"
#include "lsdd/error.hpp"

namespace lsdd {

WindowKind parse_window_kind(std::string_view name) {
  if (name == "hann") return WindowKind::kHann;
  if (name == "rect" || name == "rectangular") return WindowKind::kRectangular;
  throw ParameterError("unknown window kind '" + std::string(name) + "'");
}

std::string_view to_string(WindowKind kind) {
  return kind == WindowKind::kHann ? "hann" : "rect";
}

std::size_t StftParams::frame_count(std::size_t samples) const {
  if (samples < nfft || hop == 0) return 0;
  return (samples - nfft) / hop + 1;
}

double StftParams::bin_freq_hz(std::size_t f) const {
  return static_cast<double>(f) * sample_rate_hz / static_cast<double>(nfft);
}

double StftParams::frame_time_s(std::size_t t) const {
  return (static_cast<double>(t * hop) + 0.5 * static_cast<double>(nfft)) /
         sample_rate_hz;
}

StftTensor make_stft_tensor(std::size_t mics, std::size_t frames,
                            const StftParams& params) {
  if (params.nfft < 2 || params.nfft % 2 != 0) {
    throw ParameterError("nfft must be even and >= 2");
  }
  if (params.hop == 0) throw ParameterError("hop must be >= 1");
  if (!(params.sample_rate_hz > 0.0)) throw ParameterError("sample rate must be > 0");
  StftTensor out;
  out.params = params;
  out.values = Tensor3<cdouble>(mics, frames, params.bin_count());
  for (std::size_t t = 0; t < frames; ++t) out.frame_times_s.push_back(params.frame_time_s(t));
  for (std::size_t f = 0; f < params.bin_count(); ++f) out.bin_freqs_hz.push_back(params.bin_freq_hz(f));
  return out;
}

std::vector<double> make_window(WindowKind kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::kHann) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * angles::kPi * static_cast<double>(i) /
                                  static_cast<double>(n));
    }
  }
  return w;
}

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
struct BufferDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

StftTensor analyze(const std::vector<std::vector<double>>& signals,
                   const StftParams& params) {
  if (signals.empty()) throw ParameterError("no input channels");
  const std::size_t samples = signals.front().size();
  for (const auto& ch : signals) {
    if (ch.size() != samples) throw ParameterError("channel lengths differ");
  }
  if (params.hop == 0) throw ParameterError("hop must be >= 1");
  if (samples < params.nfft) {
    throw InputTooShortError("signal has " + std::to_string(samples) +
                             " samples, shorter than nfft " +
                             std::to_string(params.nfft));
  }
  StftTensor out = make_stft_tensor(signals.size(), params.frame_count(samples), params);
  const std::size_t n = params.nfft;
  const std::size_t bins = params.bin_count();
  const auto window = make_window(params.window, n);

  std::unique_ptr<double, BufferDeleter> in(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, BufferDeleter> spec(fftw_alloc_complex(bins));
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan(
      fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), spec.get(), FFTW_ESTIMATE));

  for (std::size_t m = 0; m < signals.size(); ++m) {
    const auto& ch = signals[m];
    for (std::size_t t = 0; t < out.frame_count(); ++t) {
      const std::size_t start = t * params.hop;
      for (std::size_t i = 0; i < n; ++i) in.get()[i] = ch[start + i] * window[i];
      fftw_execute(plan.get());
      auto row = out.values.row(m, t);
      for (std::size_t f = 0; f < bins; ++f) {
        row[f] = cdouble(spec.get()[f][0], spec.get()[f][1]);
      }
    }
  }
  return out;
}

BandRange band_indices(std::span<const double> bin_freqs_hz, double f_low_hz,
                       double f_high_hz) {
  if (bin_freqs_hz.empty()) throw BandError("no frequency bins");
  const double nyquist = bin_freqs_hz.back();
  if (!(f_low_hz >= 0.0) || !(f_low_hz < f_high_hz) || f_high_hz > nyquist) {
    throw BandError("band must satisfy 0 <= f_low < f_high <= Nyquist");
  }
  std::size_t first = bin_freqs_hz.size();
  std::size_t last = 0;
  for (std::size_t f = 0; f < bin_freqs_hz.size(); ++f) {
    if (bin_freqs_hz[f] >= f_low_hz && bin_freqs_hz[f] <= f_high_hz) {
      first = std::min(first, f);
      last = f;
    }
  }
  if (first == bin_freqs_hz.size()) throw BandError("band selects no bins");
  return {first, last};
}

BandRange band_indices(const StftTensor& tensor, double f_low_hz,
                       double f_high_hz) {
  return band_indices(tensor.bin_freqs_hz, f_low_hz, f_high_hz);
}

}  // namespace lsdd
