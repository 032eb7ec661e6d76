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
#include <optional>
#include <string>
#include <vector>

#include "lsdd/array_model.hpp"
#include "lsdd/stft.hpp"
#include "lsdd/timeline.hpp"

namespace lsdd {

enum class SignalKind {
  kModulatedNoise,  // gated complex Gaussian with a per-frame envelope
  kToneComb,        // fixed-magnitude tones on every comb_spacing-th bin
};

enum class SourceRole {
  kTalker,      // appears in the VAD truth
  kInterferer,  // directional reflection or noise source, never a target
};

struct SourceSpec {
  std::string id;
  Trajectory trajectory;  // room frame
  SignalKind kind = SignalKind::kModulatedNoise;
  SourceRole role = SourceRole::kTalker;
  double level_db = 0.0;
  std::vector<Span> active;  // activity by frame center time
  // kModulatedNoise: probability that a time-frequency bin carries energy,
  // and the standard deviation of the per-frame log envelope.
  double occupancy = 1.0;
  double envelope_db = 0.0;
  // Occupancy is drawn once per tile of tile_frames x tile_bins cells.
  // 1 x 1 gives independent bins.
  std::size_t tile_frames = 1;
  std::size_t tile_bins = 1;
  // Sources naming the same group never share a tile: one draw per tile
  // picks at most one of them, each with its own occupancy.
  std::string tile_group;
  // kToneComb: bins f with f % comb_spacing == comb_offset.
  std::size_t comb_spacing = 4;
  std::size_t comb_offset = 0;
};

struct SceneSpec {
  double duration_s = 1.0;
  std::vector<SourceSpec> sources;
  Trajectory array_yaw = Trajectory::constant(0.0);
  // Ratio of source power to noise power over the frames where a source is
  // active and the bins in snr_band. nullopt disables noise.
  std::optional<double> snr_db;
  double snr_band_low_hz = 1500.0;
  double snr_band_high_hz = 3500.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SourceTruth {
  std::string id;
  SourceRole role = SourceRole::kTalker;
  std::vector<double> psi_deg;            // per frame, direction actually synthesized
  std::vector<double> psi_requested_deg;  // per frame, before grid snapping
  std::vector<std::uint8_t> active;       // per frame
  std::vector<Span> activity;             // merged spans from the spec
};

struct SceneTruth {
  std::vector<double> frame_times_s;
  std::vector<double> delta_array_deg;  // per frame
  std::vector<SourceTruth> sources;
  double duration_s = 0.0;
  double noise_variance = 0.0;  // per mic, per bin
  std::uint64_t seed = 0;

  // Talkers only, trajectories sampled at the frame grid.
  GroundTruth ground_truth() const;
};

struct Scene {
  StftTensor stft;
  SceneTruth truth;
};

// x(t, f) = sum_k s_k(t, f) v(psi_k(t) - delta(t), f) + n(t, f), computed
// directly in the STFT domain. Source directions are snapped to the nearest
// grid direction in the array frame. Bins with no steering frequency within
// half a bin carry noise only.
Scene synthesize_stft(const SceneSpec& spec, const SteeringVectorSet& steering,
                      const StftParams& params);
Scene synthesize_stft(const SceneSpec& spec, const ArrayGeometry& geometry,
                      const DirectionGrid& grid, const StftParams& params,
                      double speed_of_sound = kDefaultSpeedOfSound);

// Scene description file (JSON). See README for the schema.
struct SceneConfig {
  SceneSpec spec;
  StftParams stft;
  ArrayGeometry geometry = ArrayGeometry::ring(6, 0.05);
  double grid_resolution_deg = 1.0;
  double speed_of_sound = kDefaultSpeedOfSound;
};

SceneConfig parse_scene_config(const std::string& text);
SceneConfig load_scene_config(const std::filesystem::path& path);

}  // namespace lsdd
