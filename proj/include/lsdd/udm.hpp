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

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "lsdd/array_model.hpp"
#include "lsdd/tensor.hpp"

namespace lsdd {

// Similarity between steering vectors of look direction h and direction l,
// lambda(h, l, f). Frequencies follow the steering set it was built from.
struct DirectivityTensor {
  Tensor3<double> lambda;
  DirectionGrid grid;
  std::vector<double> freqs_hz;
};

DirectivityTensor compute_directivity(const SteeringVectorSet& steering);

// 1 where lambda > thr (strict).
Tensor3<std::uint8_t> binarize_directivity(const DirectivityTensor& directivity,
                                           double thr);

struct NearFarCounts {
  Matrix<double> near;  // [h][f]: binarized entries within delta_near of h
  Matrix<double> far;   // [h][f]: binarized entries beyond delta_far of h
};

// Angular distances are circular. near counts |phi_l - phi_h| < delta_near,
// far counts |phi_l - phi_h| > delta_far.
NearFarCounts count_near_far(const Tensor3<std::uint8_t>& binary,
                             const DirectionGrid& grid, double delta_near_deg,
                             double delta_far_deg);

enum class RankScope {
  kGlobal,        // one ranking over every (h, f) pair
  kPerDirection,  // rank over f separately for each look direction h
};

RankScope parse_rank_scope(std::string_view name);
std::string_view to_string(RankScope scope);

// Ranks 1..n of `values` in ascending order; tied values share the mean of
// the ranks they span.
std::vector<double> average_ranks(const std::vector<double>& values);

// Sum of the rank of `near` (larger count, larger rank) and the rank of
// `far` (smaller count, larger rank), min-max normalized to [0, 1]. A
// constant rank sum maps to 1. Larger values mean a more reliable
// (direction, frequency) cell.
Matrix<double> rank_and_normalize(const NearFarCounts& counts,
                                  RankScope scope = RankScope::kGlobal);

struct UdmParams {
  double thr = 0.85;
  double delta_near_deg = 10.0;
  double delta_far_deg = 25.0;
  RankScope scope = RankScope::kGlobal;

  void validate() const;
};

// Universal directivity map: array reliability over [look direction][freq].
struct Udm {
  Matrix<double> xi_map;
  UdmParams params;
  DirectionGrid grid;
  std::vector<double> freqs_hz;

  double alpha(std::size_t direction, std::size_t freq) const {
    return xi_map(direction, freq);
  }
  // Index into freqs_hz nearest to `hz`; ParameterError if further than
  // `tolerance_hz`.
  std::size_t freq_index(double hz, double tolerance_hz) const;
};

// Builds the map over the steering frequencies inside [f_low, f_high].
// Works one frequency at a time so the full directivity tensor is never
// held in memory.
Udm build_udm(const SteeringVectorSet& steering, const UdmParams& params,
              double f_low_hz, double f_high_hz);

// w = alpha(nearest grid direction to phi_hat, freq) * xi.
double reliability_weight(const Udm& udm, double phi_hat_deg,
                          std::size_t freq, double xi);

// UDM cache, version 1: ASCII header
//
//   LSDD-UDM 1
//   thr <v>
//   delta_near_deg <v>
//   delta_far_deg <v>
//   rank_scope global|per-direction
//   directions <L>
//   freqs <F>
//   grid <L azimuths>
//   freq_hz <F frequencies>
//   payload float32-le
//   end
//
// followed by L*F little-endian float32 values in [h][f] order.
void save_udm(const Udm& udm, const std::filesystem::path& path);
Udm load_udm(const std::filesystem::path& path);

}  // namespace lsdd
