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

#include "lsdd/timeline.hpp"

#include <algorithm>
#include <cmath>

#include "lsdd/angles.hpp"
#include "lsdd/error.hpp"

namespace lsdd {

namespace {

constexpr double kTimeEps = 1e-9;

double clamp_time(const Trajectory& traj, double t) {
  if (traj.keyframes().size() < 2) return t;
  return std::clamp(t, traj.start_s(), traj.end_s());
}

}  // namespace

Trajectory::Trajectory(std::vector<Keyframe> keys) : keys_(std::move(keys)) {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!std::isfinite(keys_[i].t_s) || !std::isfinite(keys_[i].azimuth_deg)) {
      throw ParameterError("trajectory keyframe is not finite");
    }
    if (i > 0 && !(keys_[i].t_s > keys_[i - 1].t_s)) {
      throw ParameterError("trajectory keyframe times must be strictly increasing");
    }
  }
}

double Trajectory::start_s() const {
  return keys_.size() < 2 ? -INFINITY : keys_.front().t_s;
}

double Trajectory::end_s() const {
  return keys_.size() < 2 ? INFINITY : keys_.back().t_s;
}

bool Trajectory::covers(double t0_s, double t1_s) const {
  return !keys_.empty() && t0_s >= start_s() - kTimeEps && t1_s <= end_s() + kTimeEps;
}

double Trajectory::sample(double t_s) const {
  if (keys_.empty()) throw ParameterError("empty trajectory");
  if (keys_.size() == 1) return angles::wrap180(keys_.front().azimuth_deg);
  if (!(t_s >= start_s() - kTimeEps && t_s <= end_s() + kTimeEps)) {
    throw ParameterError("time outside trajectory range");
  }
  const double t = std::clamp(t_s, start_s(), end_s());
  auto it = std::upper_bound(keys_.begin(), keys_.end(), t,
                             [](double v, const Keyframe& k) { return v < k.t_s; });
  if (it == keys_.end()) return angles::wrap180(keys_.back().azimuth_deg);
  const Keyframe& b = *it;
  const Keyframe& a = *(it - 1);
  const double frac = (t - a.t_s) / (b.t_s - a.t_s);
  return angles::wrap180(a.azimuth_deg +
                         angles::wrap180(b.azimuth_deg - a.azimuth_deg) * frac);
}

double Trajectory::excursion(double t0_s, double t1_s) const {
  if (keys_.size() < 2 || !(t1_s > t0_s)) return 0.0;
  const double t0 = std::clamp(t0_s, start_s(), end_s());
  const double t1 = std::clamp(t1_s, start_s(), end_s());
  double pos = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double prev = t0;
  for (std::size_t s = 0; s + 1 < keys_.size() && prev < t1; ++s) {
    const Keyframe& a = keys_[s];
    const Keyframe& b = keys_[s + 1];
    if (b.t_s <= prev) continue;
    const double stop = std::min(b.t_s, t1);
    const double slope = angles::wrap180(b.azimuth_deg - a.azimuth_deg) / (b.t_s - a.t_s);
    pos += slope * (stop - prev);
    lo = std::min(lo, pos);
    hi = std::max(hi, pos);
    prev = stop;
  }
  return hi - lo;
}

double sample_trajectory(const Trajectory& trajectory, double t_s) {
  return trajectory.sample(t_s);
}

std::vector<Span> merge_spans(std::vector<Span> spans) {
  for (const auto& s : spans) {
    if (!(s.end_s >= s.start_s)) throw ParameterError("activity span ends before it starts");
  }
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start_s < b.start_s; });
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.start_s <= out.back().end_s) {
      out.back().end_s = std::max(out.back().end_s, s.end_s);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

bool spans_cover(const std::vector<Span>& merged, double t0_s, double t1_s) {
  return std::any_of(merged.begin(), merged.end(), [&](const Span& s) {
    return s.start_s <= t0_s + kTimeEps && s.end_s >= t1_s - kTimeEps;
  });
}

const SpeakerTrack* GroundTruth::find(const std::string& id) const {
  for (const auto& s : speakers) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

double GroundTruth::yaw_at(double t_s) const {
  if (!array_yaw || array_yaw->empty()) return 0.0;
  return array_yaw->sample(clamp_time(*array_yaw, t_s));
}

std::vector<IntervalRecord> segment_intervals(const GroundTruth& truth,
                                              double interval_s,
                                              std::optional<double> zeta_deg) {
  if (!(interval_s > 0.0)) throw ParameterError("interval length must be > 0");
  if (zeta_deg && !(*zeta_deg > 0.0)) throw ParameterError("zeta must be > 0");
  const auto count =
      static_cast<std::size_t>(std::floor(truth.duration_s / interval_s + kTimeEps));
  std::vector<IntervalRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    IntervalRecord r;
    r.index = i;
    r.start_s = static_cast<double>(i) * interval_s;
    r.end_s = static_cast<double>(i + 1) * interval_s;
    r.mid_s = 0.5 * (r.start_s + r.end_s);
    for (const auto& sp : truth.speakers) {
      if (!spans_cover(sp.activity, r.start_s, r.end_s)) continue;
      r.speaker_ids.push_back(sp.id);
      if (zeta_deg && sp.azimuth.excursion(r.start_s, r.end_s) > *zeta_deg + kTimeEps) {
        r.dynamic = true;
      }
    }
    r.speakers = r.speaker_ids.size();
    r.active = r.speakers > 0;
    r.delta_array_deg = truth.yaw_at(r.mid_s);
    out.push_back(std::move(r));
  }
  return out;
}

double to_room_frame(double phi_hat_deg, double delta_array_deg) {
  return angles::wrap180(phi_hat_deg + delta_array_deg);
}

DynamicTable classify_dynamic(const std::vector<Trajectory>& trajectories,
                              double duration_s,
                              const std::vector<double>& interval_ms,
                              const std::vector<double>& zeta_deg) {
  DynamicTable table{interval_ms, zeta_deg, {}};
  for (double z : zeta_deg) {
    if (!(z > 0.0)) throw ParameterError("zeta must be > 0");
  }
  for (double ms : interval_ms) {
    if (!(ms > 0.0)) throw ParameterError("interval length must be > 0");
    const double dt = ms / 1000.0;
    const auto count = static_cast<std::size_t>(std::floor(duration_s / dt + kTimeEps));
    std::vector<double> row;
    for (double z : zeta_deg) {
      std::size_t dynamic = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const double t0 = static_cast<double>(i) * dt;
        const double t1 = static_cast<double>(i + 1) * dt;
        const bool moved = std::any_of(
            trajectories.begin(), trajectories.end(),
            [&](const Trajectory& tr) { return tr.excursion(t0, t1) > z + kTimeEps; });
        if (moved) ++dynamic;
      }
      row.push_back(count ? 100.0 * static_cast<double>(dynamic) / static_cast<double>(count)
                          : 0.0);
    }
    table.percent.push_back(std::move(row));
  }
  return table;
}

}  // namespace lsdd
