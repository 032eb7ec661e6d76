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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lsdd/array_model.hpp"
#include "lsdd/tensor.hpp"

namespace lsdd {

enum class WindowKind { kHann, kRectangular };

WindowKind parse_window_kind(std::string_view name);
std::string_view to_string(WindowKind kind);

struct StftParams {
  double sample_rate_hz = 16000.0;
  std::size_t nfft = 1024;
  std::size_t hop = 512;
  WindowKind window = WindowKind::kHann;

  std::size_t bin_count() const { return nfft / 2 + 1; }
  // Frames produced for a signal of `samples` samples (0 if shorter than nfft).
  std::size_t frame_count(std::size_t samples) const;
  double bin_freq_hz(std::size_t f) const;
  // Time of the center of frame t, seconds.
  double frame_time_s(std::size_t t) const;
};

// One-sided multichannel STFT, values indexed [mic][frame][bin].
struct StftTensor {
  Tensor3<cdouble> values;
  StftParams params;
  std::vector<double> frame_times_s;
  std::vector<double> bin_freqs_hz;

  std::size_t mic_count() const { return values.dim(0); }
  std::size_t frame_count() const { return values.dim(1); }
  std::size_t bin_count() const { return values.dim(2); }
};

// Builds an empty tensor with the time and frequency axes filled in.
StftTensor make_stft_tensor(std::size_t mics, std::size_t frames,
                            const StftParams& params);

// Periodic window of length n.
std::vector<double> make_window(WindowKind kind, std::size_t n);

// Frames start at t*hop; a trailing partial frame is dropped.
StftTensor analyze(const std::vector<std::vector<double>>& signals,
                   const StftParams& params);

// Inclusive range of frequency-bin indices.
struct BandRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first + 1; }
  bool contains(std::size_t f) const { return f >= first && f <= last; }
  bool operator==(const BandRange&) const = default;
};

// All bins with f_low <= freq <= f_high. Throws BandError on an empty or
// ill-formed band.
BandRange band_indices(std::span<const double> bin_freqs_hz, double f_low_hz,
                       double f_high_hz);
BandRange band_indices(const StftTensor& tensor, double f_low_hz,
                       double f_high_hz);

}  // namespace lsdd
