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
#include <optional>
#include <string>
#include <vector>

namespace lsdd {

struct Keyframe {
  double t_s = 0.0;
  double azimuth_deg = 0.0;
};

// Piecewise-linear azimuth over time. Each segment follows the shorter arc
// between its endpoints. A single keyframe is constant for all t.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Keyframe> keys);
  static Trajectory constant(double azimuth_deg) { return Trajectory({{0.0, azimuth_deg}}); }

  const std::vector<Keyframe>& keyframes() const { return keys_; }
  bool empty() const { return keys_.empty(); }
  double start_s() const;
  double end_s() const;
  bool covers(double t0_s, double t1_s) const;

  // Azimuth at t, wrapped to (-180, 180]. ParameterError outside the
  // keyframe range.
  double sample(double t_s) const;

  // max - min of the unwrapped azimuth over [t0, t1]: the largest angular
  // change inside the window.
  double excursion(double t0_s, double t1_s) const;

 private:
  std::vector<Keyframe> keys_;
};

double sample_trajectory(const Trajectory& trajectory, double t_s);

struct Span {
  double start_s = 0.0;
  double end_s = 0.0;
  bool operator==(const Span&) const = default;
};

// Sorted union of spans; overlapping or touching spans merge.
std::vector<Span> merge_spans(std::vector<Span> spans);
// True when the union of `spans` contains all of [t0, t1].
bool spans_cover(const std::vector<Span>& merged, double t0_s, double t1_s);

struct SpeakerTrack {
  std::string id;
  Trajectory azimuth;       // room frame
  std::vector<Span> activity;  // merged
};

// Everything the evaluator needs to know about a session.
struct GroundTruth {
  std::vector<SpeakerTrack> speakers;
  std::optional<Trajectory> array_yaw;
  double duration_s = 0.0;
  std::vector<std::string> warnings;

  const SpeakerTrack* find(const std::string& id) const;
  double yaw_at(double t_s) const;
};

struct IntervalRecord {
  std::size_t index = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  double mid_s = 0.0;  // T
  bool active = false;
  std::size_t speakers = 0;  // K
  std::vector<std::string> speaker_ids;
  double delta_array_deg = 0.0;
  bool dynamic = false;
};

// Intervals [i*dT, (i+1)*dT) for every full interval inside the session.
// An interval is active when at least one speaker talks throughout it; K
// counts those speakers. dynamic is set when zeta_deg is given and some
// active speaker's azimuth moves by more than zeta inside the interval.
std::vector<IntervalRecord> segment_intervals(const GroundTruth& truth,
                                              double interval_s,
                                              std::optional<double> zeta_deg = std::nullopt);

// Room-frame DOA: phi + delta, wrapped to (-180, 180].
double to_room_frame(double phi_hat_deg, double delta_array_deg);

struct DynamicTable {
  std::vector<double> interval_ms;
  std::vector<double> zeta_deg;
  // percent[i][j]: share of intervals of length interval_ms[i] in which some
  // trajectory changes by more than zeta_deg[j].
  std::vector<std::vector<double>> percent;
};

DynamicTable classify_dynamic(const std::vector<Trajectory>& trajectories,
                              double duration_s,
                              const std::vector<double>& interval_ms,
                              const std::vector<double>& zeta_deg);

}  // namespace lsdd
