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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lsdd {

inline constexpr double kDefaultQualityCap = 1e6;

// A valid bin's room-frame DOA and its reliability weight.
struct WeightedEstimate {
  double theta_deg = 0.0;
  double w = 0.0;
};

// 1-degree histogram over the ring of integer azimuths -179..180 (180 and
// -180 share a bin).
class WeightedHistogram {
 public:
  static constexpr std::size_t kBins = 360;

  // Integer degree (-179..180) holding `theta_deg`: nearest integer, halves
  // rounded up, wrapped onto the ring.
  static int bin_of(double theta_deg);
  static std::size_t slot(int degree) {
    return static_cast<std::size_t>(degree + 179);
  }
  static int degree(std::size_t slot) { return static_cast<int>(slot) - 179; }

  void add(double theta_deg, double w);

  double at(int degree) const { return bins_[slot(degree)]; }
  const std::array<double, kBins>& bins() const { return bins_; }
  std::array<double, kBins>& bins() { return bins_; }
  double total_weight() const { return total_; }

 private:
  std::array<double, kBins> bins_{};
  double total_ = 0.0;
};

WeightedHistogram accumulate(std::span<const WeightedEstimate> estimates);

struct ProvisionalCluster {
  int center_deg = 0;
  double weight = 0.0;   // window sum captured at selection time
  bool defined = false;  // false once the histogram ran out of weight
};

// Greedy subtractive clustering on a circular histogram: K+1 times, take the
// center with the largest (2*delta+1)-bin window sum, record it, and zero its
// window. Ties go to the heavier center bin, then the lowest degree.
// `histogram` is taken by value.
std::vector<ProvisionalCluster> subtractive_cluster(WeightedHistogram histogram,
                                                    std::size_t speakers,
                                                    int delta_deg);

// Weighted circular mean of member DOAs, each unwrapped next to
// `center_deg`. nullopt when the members carry no weight.
std::optional<double> cluster_doa(std::span<const WeightedEstimate> members,
                                  double center_deg);

// Q(k) = W_k / W_{K+1} for k = 1..K. When W_{K+1} is zero, clusters with
// weight get `cap` and empty ones get 0.
std::vector<double> quality(std::span<const double> weights,
                            double cap = kDefaultQualityCap);

struct ClusterResult {
  std::size_t k = 0;  // 1-based rank
  int center_deg = 0;
  double theta_hat_deg = 0.0;
  double weight = 0.0;
  std::size_t member_count = 0;
  double quality = 0.0;  // 0 for the (K+1)th reference cluster
  bool defined = false;
};

// Full per-interval procedure: histogram, K+1 subtractive passes, member
// assignment, weighted DOA per cluster, and qualities. Returns K+1 entries;
// the last one only serves as the quality reference.
std::vector<ClusterResult> cluster_interval(std::span<const WeightedEstimate> estimates,
                                            std::size_t speakers, int delta_deg,
                                            double quality_cap = kDefaultQualityCap);

}  // namespace lsdd
