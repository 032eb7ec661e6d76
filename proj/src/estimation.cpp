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

#include <cmath>
#include <unordered_map>

#include "lsdd/error.hpp"
#include "lsdd/pipeline.hpp"

namespace lsdd {

void apply_weights(std::vector<BinEstimate>& bins, WeightMode mode, const Udm* udm,
                   const StftTensor& stft) {
  if (mode == WeightMode::kBase) {
    for (auto& b : bins) b.w = 1.0;
    return;
  }
  if (!udm) throw ParameterError("weight_mode=new needs a UDM");
  const double half_bin = 0.5 * stft.params.sample_rate_hz / static_cast<double>(stft.params.nfft);
  std::unordered_map<std::size_t, std::size_t> udm_freq;
  for (auto& b : bins) {
    auto it = udm_freq.find(b.f);
    if (it == udm_freq.end()) {
      it = udm_freq.emplace(b.f, udm->freq_index(stft.bin_freqs_hz[b.f], half_bin)).first;
    }
    b.w = reliability_weight(*udm, b.phi_hat_deg, it->second, b.xi);
  }
}

EstimationResult run_estimation(const PipelineConfig& config,
                                const SteeringVectorSet& steering,
                                const Udm* udm, const StftTensor& stft,
                                const std::vector<IntervalRecord>& intervals,
                                const std::vector<double>& frame_yaw_deg) {
  config.validate();
  if (!frame_yaw_deg.empty() && frame_yaw_deg.size() != stft.frame_count()) {
    throw ParameterError("frame yaw list does not match the STFT frame count");
  }
  if (std::fabs(steering.grid().resolution_deg() - config.grid_resolution_deg) > 1e-9) {
    throw ParameterError("steering grid resolution does not match grid_resolution_deg");
  }
  if (udm && !(udm->grid == steering.grid())) {
    throw ParameterError("UDM and steering set use different direction grids");
  }
  const BandRange band = band_indices(stft, config.f_low_hz, config.f_high_hz);
  const auto spectrum = smooth_spectrum(compute_spectrum(stft, steering, band),
                                        config.smoothing_rt, config.smoothing_rf);
  auto bins = estimate_bins(spectrum, config.lambda);
  apply_weights(bins, config.weight_mode, udm, stft);

  const double interval_s = config.interval_ms / 1000.0;
  std::unordered_map<std::size_t, std::size_t> slot_of_index;
  for (std::size_t i = 0; i < intervals.size(); ++i) slot_of_index[intervals[i].index] = i;

  EstimationResult out;
  out.frame_times_s = stft.frame_times_s;
  out.total_bins = bins.size();
  out.intervals.resize(intervals.size());
  for (std::size_t i = 0; i < intervals.size(); ++i) out.intervals[i].interval = intervals[i];

  std::vector<std::vector<WeightedEstimate>> members(intervals.size());
  for (const auto& b : bins) {
    if (!b.valid) continue;
    ++out.valid_bins;
    const double time = stft.frame_times_s[b.t];
    const auto index = static_cast<std::size_t>(std::floor(time / interval_s));
    const auto it = slot_of_index.find(index);
    if (it == slot_of_index.end()) continue;
    auto& res = out.intervals[it->second];
    if (!res.interval.active) continue;
    const double yaw =
        frame_yaw_deg.empty() ? res.interval.delta_array_deg : frame_yaw_deg[b.t];
    const double theta = to_room_frame(b.phi_hat_deg, yaw);
    res.bins.push_back({b.t, theta, b.w});
    members[it->second].push_back({theta, b.w});
  }

  for (std::size_t i = 0; i < intervals.size(); ++i) {
    auto& res = out.intervals[i];
    res.valid_bins = res.bins.size();
    if (!res.interval.active || res.bins.empty()) continue;
    res.clusters = cluster_interval(members[i], res.interval.speakers,
                                    config.cluster_delta_deg, config.quality_cap);
    if (config.quality_mode == QualityMode::kBase) {
      for (std::size_t k = 0; k + 1 < res.clusters.size(); ++k) res.clusters[k].quality = 1.0;
    }
  }
  return out;
}

}  // namespace lsdd
