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

#include "lsdd/scene.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsdd/angles.hpp"
#include "lsdd/error.hpp"

namespace lsdd {

namespace {

constexpr std::size_t kNoSteering = static_cast<std::size_t>(-1);

bool is_active(const std::vector<Span>& spans, double t) {
  for (const auto& s : spans) {
    if (t >= s.start_s && t < s.end_s) return true;
  }
  return false;
}

void check_covers(const Trajectory& traj, double duration, const std::string& what) {
  if (traj.empty()) throw ParameterError(what + " trajectory is empty");
  if (!traj.covers(0.0, duration)) {
    throw ParameterError(what + " trajectory does not cover [0, duration]");
  }
  for (const auto& k : traj.keyframes()) {
    if (!(k.azimuth_deg > -180.0 && k.azimuth_deg <= 180.0)) {
      throw ParameterError(what + " trajectory azimuth outside (-180, 180]");
    }
  }
}

double frac(double v) { return v - std::floor(v); }

}  // namespace

void SceneSpec::validate() const {
  if (!(duration_s > 0.0)) throw ParameterError("scene duration must be > 0");
  if (sources.empty() && !snr_db) {
    throw ParameterError("scene needs at least a noise field (sources or snr_db)");
  }
  if (snr_db && !std::isfinite(*snr_db)) throw ParameterError("snr_db must be finite");
  check_covers(array_yaw, duration_s, "array yaw");
  for (const auto& s : sources) {
    check_covers(s.trajectory, duration_s, "source '" + s.id + "'");
    if (!std::isfinite(s.level_db)) throw ParameterError("source level must be finite");
    if (!(s.occupancy >= 0.0 && s.occupancy <= 1.0)) {
      throw ParameterError("source occupancy must lie in [0, 1]");
    }
    if (!(s.envelope_db >= 0.0)) throw ParameterError("envelope_db must be >= 0");
    if (s.comb_spacing == 0) throw ParameterError("comb spacing must be >= 1");
    if (s.tile_frames == 0 || s.tile_bins == 0) throw ParameterError("tile sizes must be >= 1");
    if (!s.tile_group.empty()) {
      double total = 0.0;
      for (const auto& o : sources) {
        if (o.tile_group != s.tile_group) continue;
        if (o.tile_frames != s.tile_frames || o.tile_bins != s.tile_bins) {
          throw ParameterError("tile group '" + s.tile_group + "' mixes tile sizes");
        }
        total += o.occupancy;
      }
      if (total > 1.0 + 1e-12) {
        throw ParameterError("tile group '" + s.tile_group + "' occupancies sum above 1");
      }
    }
    merge_spans(s.active);
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      if (sources[i].id == sources[j].id) {
        throw ParameterError("duplicate source id '" + sources[i].id + "'");
      }
    }
  }
}

namespace {

// Independent stream per source so adding or removing one source leaves the
// others' signals untouched.
std::mt19937_64 stream_for(std::uint64_t seed, const std::string& tag) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
  for (char c : tag) words.push_back(static_cast<unsigned char>(c));
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Scene synthesize_stft(const SceneSpec& spec, const SteeringVectorSet& steering,
                      const StftParams& params) {
  spec.validate();
  const auto samples = static_cast<std::size_t>(std::llround(spec.duration_s * params.sample_rate_hz));
  if (samples < params.nfft) {
    throw InputTooShortError("scene shorter than one analysis frame");
  }
  const std::size_t mics = steering.mic_count();
  Scene scene{make_stft_tensor(mics, params.frame_count(samples), params), {}};
  auto& x = scene.stft.values;
  const std::size_t frames = scene.stft.frame_count();
  const std::size_t bins = scene.stft.bin_count();
  const auto& times = scene.stft.frame_times_s;
  const auto& grid = steering.grid();

  const double half_bin = 0.5 * params.sample_rate_hz / static_cast<double>(params.nfft);
  std::vector<std::size_t> steer_freq(bins, kNoSteering);
  for (std::size_t f = 0; f < bins; ++f) {
    try {
      steer_freq[f] = steering.freq_index(scene.stft.bin_freqs_hz[f], half_bin);
    } catch (const ParameterError&) {
    }
  }

  SceneTruth& truth = scene.truth;
  truth.frame_times_s = times;
  truth.duration_s = spec.duration_s;
  truth.seed = spec.seed;
  for (double t : times) truth.delta_array_deg.push_back(spec.array_yaw.sample(t));

  std::vector<std::uint8_t> any_active(frames, 0);

  for (std::size_t k = 0; k < spec.sources.size(); ++k) {
    const auto& src = spec.sources[k];
    auto rng = stream_for(spec.seed, "source:" + src.id);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    SourceTruth st;
    st.id = src.id;
    st.role = src.role;
    st.activity = merge_spans(src.active);
    const double amplitude = std::pow(10.0, src.level_db / 20.0);
    const bool tiled = src.tile_frames > 1 || src.tile_bins > 1 || !src.tile_group.empty();
    Matrix<std::uint8_t> tiles;
    if (tiled) {
      // Group members own consecutive slices of [0, 1).
      double lo = 0.0;
      std::string tag = "tiles:" + src.id;
      if (!src.tile_group.empty()) {
        tag = "tile-group:" + src.tile_group;
        for (std::size_t j = 0; j < k; ++j) {
          if (spec.sources[j].tile_group == src.tile_group) lo += spec.sources[j].occupancy;
        }
      }
      const double hi = lo + src.occupancy;
      auto tile_rng = stream_for(spec.seed, tag);
      tiles = Matrix<std::uint8_t>((frames + src.tile_frames - 1) / src.tile_frames,
                                   (bins + src.tile_bins - 1) / src.tile_bins);
      for (auto& cell : tiles.data()) {
        const double u = uniform(tile_rng);
        cell = (u >= lo && u < hi) ? 1 : 0;
      }
    }
    for (std::size_t t = 0; t < frames; ++t) {
      const double yaw = truth.delta_array_deg[t];
      const double requested = src.trajectory.sample(times[t]);
      const std::size_t l = grid.nearest(requested - yaw);
      const bool active = is_active(st.activity, times[t]);
      st.psi_requested_deg.push_back(requested);
      st.psi_deg.push_back(to_room_frame(grid[l], yaw));
      st.active.push_back(active ? 1 : 0);
      if (active) any_active[t] = 1;

      const double envelope = std::pow(10.0, src.envelope_db * normal(rng) / 20.0);
      for (std::size_t f = 0; f < bins; ++f) {
        cdouble s{0.0, 0.0};
        if (src.kind == SignalKind::kModulatedNoise) {
          const double u = uniform(rng);
          const double re = normal(rng);
          const double im = normal(rng);
          const bool on = tiled ? tiles(t / src.tile_frames, f / src.tile_bins) != 0
                                : u < src.occupancy;
          if (on) {
            s = amplitude * envelope * cdouble(re, im) / std::sqrt(2.0);
          }
        } else if (f % src.comb_spacing == src.comb_offset) {
          const double phase = 2.0 * angles::kPi *
                               frac(0.6180339887498949 * static_cast<double>(f) +
                                    0.7548776662466927 * static_cast<double>(t) +
                                    0.5698402909980532 * static_cast<double>(k));
          s = std::polar(amplitude, phase);
        }
        if (!active || steer_freq[f] == kNoSteering) continue;
        const auto v = steering.vector(l, steer_freq[f]);
        for (std::size_t m = 0; m < mics; ++m) x(m, t, f) += s * v[m];
      }
    }
    truth.sources.push_back(std::move(st));
  }

  if (spec.snr_db) {
    const auto band = band_indices(scene.stft, spec.snr_band_low_hz, spec.snr_band_high_hz);
    double power = 0.0;
    std::size_t active_frames = 0;
    for (std::size_t t = 0; t < frames; ++t) {
      if (!any_active[t]) continue;
      ++active_frames;
      for (std::size_t m = 0; m < mics; ++m) {
        for (std::size_t f = band.first; f <= band.last; ++f) power += std::norm(x(m, t, f));
      }
    }
    const double ratio = std::pow(10.0, *spec.snr_db / 10.0);
    double variance = 1.0 / ratio;
    if (power > 0.0) {
      variance = power / (static_cast<double>(active_frames * band.size() * mics) * ratio);
    }
    truth.noise_variance = variance;
    const double scale = std::sqrt(variance / 2.0);
    auto rng = stream_for(spec.seed, "noise");
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t m = 0; m < mics; ++m) {
      for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t f = 0; f < bins; ++f) {
          const double re = normal(rng);
          const double im = normal(rng);
          x(m, t, f) += scale * cdouble(re, im);
        }
      }
    }
  }
  return scene;
}

Scene synthesize_stft(const SceneSpec& spec, const ArrayGeometry& geometry,
                      const DirectionGrid& grid, const StftParams& params,
                      double speed_of_sound) {
  std::vector<double> freqs;
  for (std::size_t f = 0; f < params.bin_count(); ++f) freqs.push_back(params.bin_freq_hz(f));
  return synthesize_stft(spec, free_field_steering(geometry, grid, freqs, speed_of_sound),
                         params);
}

GroundTruth SceneTruth::ground_truth() const {
  auto sampled = [&](const std::vector<double>& values) {
    std::vector<Keyframe> keys;
    if (values.empty()) return Trajectory::constant(0.0);
    keys.push_back({0.0, values.front()});
    for (std::size_t t = 0; t < values.size(); ++t) {
      if (frame_times_s[t] > keys.back().t_s) keys.push_back({frame_times_s[t], values[t]});
    }
    if (duration_s > keys.back().t_s) keys.push_back({duration_s, values.back()});
    return Trajectory(std::move(keys));
  };
  GroundTruth gt;
  gt.duration_s = duration_s;
  gt.array_yaw = sampled(delta_array_deg);
  for (const auto& s : sources) {
    if (s.role != SourceRole::kTalker) continue;
    gt.speakers.push_back({s.id, sampled(s.psi_deg), s.activity});
  }
  return gt;
}

namespace {

using nlohmann::json;

Trajectory trajectory_from(const json& j, const std::string& what) {
  if (j.is_number()) return Trajectory::constant(j.get<double>());
  if (!j.is_array()) throw ParameterError(what + ": expected number or keyframe list");
  std::vector<Keyframe> keys;
  for (const auto& k : j) {
    if (!k.is_array() || k.size() != 2) {
      throw ParameterError(what + ": keyframes are [time_s, azimuth_deg] pairs");
    }
    keys.push_back({k[0].get<double>(), k[1].get<double>()});
  }
  return Trajectory(std::move(keys));
}

ArrayGeometry geometry_from(const json& j) {
  if (j.contains("positions")) {
    std::vector<Position> pos;
    for (const auto& p : j.at("positions")) {
      if (!p.is_array() || p.size() != 3) throw ParameterError("positions are [x, y, z]");
      pos.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    return ArrayGeometry(std::move(pos), j.value("label", std::string("custom")));
  }
  const auto kind = j.value("kind", std::string("ring"));
  const auto mics = j.value("mics", std::size_t{6});
  if (kind == "ring") return ArrayGeometry::ring(mics, j.value("radius_m", 0.05));
  if (kind == "linear") return ArrayGeometry::linear(mics, j.value("spacing_m", 0.04));
  throw ParameterError("unknown array kind '" + kind + "'");
}

}  // namespace

SceneConfig parse_scene_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("scene config: ") + e.what());
  }
  try {
    SceneConfig cfg;
    auto& spec = cfg.spec;
    spec.duration_s = j.at("duration_s").get<double>();
    spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("snr_db") && !j.at("snr_db").is_null()) spec.snr_db = j.at("snr_db").get<double>();
    if (j.contains("snr_band_hz")) {
      spec.snr_band_low_hz = j.at("snr_band_hz").at(0).get<double>();
      spec.snr_band_high_hz = j.at("snr_band_hz").at(1).get<double>();
    }
    if (j.contains("stft")) {
      const auto& s = j.at("stft");
      cfg.stft.sample_rate_hz = s.value("sample_rate_hz", cfg.stft.sample_rate_hz);
      cfg.stft.nfft = s.value("nfft", cfg.stft.nfft);
      cfg.stft.hop = s.value("hop", cfg.stft.hop);
      cfg.stft.window = parse_window_kind(s.value("window", std::string("hann")));
    }
    if (j.contains("array")) cfg.geometry = geometry_from(j.at("array"));
    cfg.grid_resolution_deg = j.value("grid_resolution_deg", cfg.grid_resolution_deg);
    cfg.speed_of_sound = j.value("speed_of_sound", cfg.speed_of_sound);
    if (j.contains("array_yaw")) spec.array_yaw = trajectory_from(j.at("array_yaw"), "array_yaw");
    for (const auto& s : j.value("sources", json::array())) {
      SourceSpec src;
      src.id = s.value("id", "s" + std::to_string(spec.sources.size() + 1));
      src.trajectory = trajectory_from(s.at("trajectory"), "source trajectory");
      const auto kind = s.value("kind", std::string("modulated-noise"));
      if (kind == "modulated-noise") {
        src.kind = SignalKind::kModulatedNoise;
      } else if (kind == "tone-comb") {
        src.kind = SignalKind::kToneComb;
      } else {
        throw ParameterError("unknown signal kind '" + kind + "'");
      }
      const auto role = s.value("role", std::string("talker"));
      if (role == "talker") {
        src.role = SourceRole::kTalker;
      } else if (role == "interferer") {
        src.role = SourceRole::kInterferer;
      } else {
        throw ParameterError("unknown source role '" + role + "'");
      }
      src.level_db = s.value("level_db", 0.0);
      src.occupancy = s.value("occupancy", 1.0);
      src.envelope_db = s.value("envelope_db", 0.0);
      src.comb_spacing = s.value("comb_spacing", std::size_t{4});
      src.comb_offset = s.value("comb_offset", std::size_t{0});
      src.tile_frames = s.value("tile_frames", std::size_t{1});
      src.tile_bins = s.value("tile_bins", std::size_t{1});
      src.tile_group = s.value("tile_group", std::string{});
      if (s.contains("active")) {
        for (const auto& a : s.at("active")) {
          src.active.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
        }
      } else {
        src.active.push_back({0.0, spec.duration_s});
      }
      spec.sources.push_back(std::move(src));
    }
    spec.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("scene config: ") + e.what());
  }
}

SceneConfig load_scene_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene_config(ss.str());
}

}  // namespace lsdd
