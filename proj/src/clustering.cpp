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

#include "lsdd/clustering.hpp"

#include <algorithm>
#include <cmath>

#include "lsdd/angles.hpp"
#include "lsdd/error.hpp"

namespace lsdd {

int WeightedHistogram::bin_of(double theta_deg) {
  auto i = static_cast<long long>(std::floor(theta_deg + 0.5));
  i %= 360;
  if (i <= -180) i += 360;
  if (i > 180) i -= 360;
  return static_cast<int>(i);
}

void WeightedHistogram::add(double theta_deg, double w) {
  bins_[slot(bin_of(theta_deg))] += w;
  total_ += w;
}

WeightedHistogram accumulate(std::span<const WeightedEstimate> estimates) {
  WeightedHistogram h;
  for (const auto& e : estimates) {
    if (!std::isfinite(e.theta_deg)) throw ParameterError("DOA estimate is not finite");
    if (!(e.w >= 0.0)) throw ParameterError("weights must be nonnegative");
    h.add(e.theta_deg, e.w);
  }
  return h;
}

namespace {

constexpr auto kRing = static_cast<long long>(WeightedHistogram::kBins);

std::size_t ring_slot(long long s) {
  return static_cast<std::size_t>(((s % kRing) + kRing) % kRing);
}

// Distinct slots of the window around `center` (the window may wrap fully).
std::vector<std::size_t> window_slots(std::size_t center, int delta) {
  std::vector<std::size_t> out;
  const long long span = std::min<long long>(2LL * delta + 1, kRing);
  const long long start = static_cast<long long>(center) - delta;
  for (long long j = 0; j < span; ++j) out.push_back(ring_slot(start + j));
  return out;
}

}  // namespace

std::vector<ProvisionalCluster> subtractive_cluster(WeightedHistogram histogram,
                                                    std::size_t speakers,
                                                    int delta_deg) {
  if (speakers < 1) throw ParameterError("need at least one active speaker");
  if (delta_deg < 1) throw ParameterError("cluster window half-width must be >= 1");
  auto& bins = histogram.bins();
  std::vector<ProvisionalCluster> out;
  for (std::size_t k = 0; k <= speakers; ++k) {
    // Largest window sum; ties go to the heavier center bin, then the
    // lower index.
    std::size_t best = 0;
    double best_sum = -1.0;
    for (std::size_t c = 0; c < WeightedHistogram::kBins; ++c) {
      double sum = 0.0;
      for (std::size_t s : window_slots(c, delta_deg)) sum += bins[s];
      if (sum > best_sum || (sum == best_sum && bins[c] > bins[best])) {
        best_sum = sum;
        best = c;
      }
    }
    ProvisionalCluster pc;
    if (best_sum > 0.0) {
      pc.center_deg = WeightedHistogram::degree(best);
      pc.weight = best_sum;
      pc.defined = true;
      for (std::size_t s : window_slots(best, delta_deg)) bins[s] = 0.0;
    }
    out.push_back(pc);
  }
  return out;
}

std::optional<double> cluster_doa(std::span<const WeightedEstimate> members,
                                  double center_deg) {
  double wsum = 0.0;
  double acc = 0.0;
  for (const auto& m : members) {
    wsum += m.w;
    acc += m.w * angles::unwrap_near(m.theta_deg, center_deg);
  }
  if (!(wsum > 0.0)) return std::nullopt;
  return angles::wrap180(acc / wsum);
}

std::vector<double> quality(std::span<const double> weights, double cap) {
  if (weights.size() < 2) throw ParameterError("quality needs K+1 >= 2 weights");
  const std::size_t k_count = weights.size() - 1;
  const double reference = weights[k_count];
  std::vector<double> q(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (reference > 0.0) {
      q[k] = weights[k] / reference;
    } else {
      q[k] = weights[k] > 0.0 ? cap : 0.0;
    }
  }
  return q;
}

std::vector<ClusterResult> cluster_interval(std::span<const WeightedEstimate> estimates,
                                            std::size_t speakers, int delta_deg,
                                            double quality_cap) {
  const auto provisional = subtractive_cluster(accumulate(estimates), speakers, delta_deg);

  // Slot of each estimate, and which cluster (if any) has claimed it.
  std::vector<std::size_t> slots(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    slots[i] = WeightedHistogram::slot(WeightedHistogram::bin_of(estimates[i].theta_deg));
  }
  std::vector<char> claimed(WeightedHistogram::kBins, 0);

  std::vector<ClusterResult> out;
  std::vector<double> weights;
  for (std::size_t k = 0; k < provisional.size(); ++k) {
    const auto& pc = provisional[k];
    ClusterResult r;
    r.k = k + 1;
    r.center_deg = pc.center_deg;
    r.weight = pc.weight;
    r.defined = pc.defined;
    if (pc.defined) {
      std::vector<char> in_window(WeightedHistogram::kBins, 0);
      for (std::size_t s : window_slots(WeightedHistogram::slot(pc.center_deg), delta_deg)) {
        if (!claimed[s]) in_window[s] = 1;
      }
      std::vector<WeightedEstimate> members;
      for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (in_window[slots[i]]) members.push_back(estimates[i]);
      }
      r.member_count = members.size();
      const auto doa = cluster_doa(members, pc.center_deg);
      if (doa) {
        r.theta_hat_deg = *doa;
      } else {
        r.defined = false;
      }
      for (std::size_t s = 0; s < in_window.size(); ++s) {
        if (in_window[s]) claimed[s] = 1;
      }
    }
    weights.push_back(r.weight);
    out.push_back(r);
  }
  const auto q = quality(weights, quality_cap);
  for (std::size_t k = 0; k < q.size(); ++k) out[k].quality = q[k];
  return out;
}

}  // namespace lsdd
