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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lsdd/array_model.hpp"
#include "lsdd/stft.hpp"
#include "lsdd/tensor.hpp"

namespace lsdd {

// |<a, b>| / (|a| |b|), clamped to [0, 1]. Throws DegenerateInputError if
// either vector has zero norm.
double cosine_similarity(std::span<const cdouble> a, std::span<const cdouble> b);

// Similarity of one snapshot against every grid direction at steering
// frequency index `steering_freq`. Returns nullopt for an all-zero snapshot.
std::optional<std::vector<double>> directional_spectrum(
    std::span<const cdouble> x_tf, const SteeringVectorSet& steering,
    std::size_t steering_freq);

// Directional spectrum over the operating band, values [frame][bin - band.first][direction].
struct SpectrumTensor {
  Tensor3<double> values;
  // 1 where the snapshot was all zero; such bins carry no direction evidence.
  std::vector<std::uint8_t> degenerate;
  DirectionGrid grid;
  BandRange band;

  std::size_t frames() const { return values.dim(0); }
  std::size_t bins() const { return values.dim(1); }
  std::size_t directions() const { return values.dim(2); }
  bool is_degenerate(std::size_t t, std::size_t fb) const {
    return degenerate[t * bins() + fb] != 0;
  }
};

// Maps every band bin of `tensor` onto the nearest steering frequency
// (within half an STFT bin) and evaluates the directional spectrum.
SpectrumTensor compute_spectrum(const StftTensor& tensor,
                                const SteeringVectorSet& steering,
                                const BandRange& band);

// Mean over the rt x rf neighborhood around each bin. The window shrinks at
// the tensor edges and skips degenerate bins; the divisor is the number of
// neighbors actually averaged.
SpectrumTensor smooth_spectrum(const SpectrumTensor& spectrum,
                               std::size_t frames_rt, std::size_t bins_rf);

struct BinEstimate {
  std::size_t t = 0;
  std::size_t f = 0;  // absolute STFT bin index
  std::size_t direction = 0;
  double phi_hat_deg = 0.0;    // array frame
  double theta_hat_deg = 0.0;  // room frame, set by the pipeline
  double xi = 0.0;             // direct-path dominance
  bool valid = false;
  double w = 1.0;
};

// Per non-degenerate bin: argmax direction (lowest index on ties), its
// value as the DPD measure, and validity xi >= lambda.
std::vector<BinEstimate> estimate_bins(const SpectrumTensor& smoothed,
                                       double lambda);

}  // namespace lsdd
