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

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "container.hpp"
#include "lsdd/error.hpp"
#include "lsdd/pipeline.hpp"

namespace lsdd {

WeightMode parse_weight_mode(std::string_view name) {
  if (name == "base") return WeightMode::kBase;
  if (name == "new") return WeightMode::kNew;
  throw ParameterError("unknown weight_mode '" + std::string(name) + "'");
}

QualityMode parse_quality_mode(std::string_view name) {
  if (name == "base") return QualityMode::kBase;
  if (name == "new") return QualityMode::kNew;
  if (name == "ideal") return QualityMode::kIdeal;
  throw ParameterError("unknown quality_mode '" + std::string(name) + "'");
}

std::string_view to_string(WeightMode mode) {
  return mode == WeightMode::kBase ? "base" : "new";
}

std::string_view to_string(QualityMode mode) {
  switch (mode) {
    case QualityMode::kBase: return "base";
    case QualityMode::kNew: return "new";
    case QualityMode::kIdeal: return "ideal";
  }
  return "new";
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double to_double(std::string_view key, std::string_view value) {
  const std::string v(value);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(d)) {
    throw ParameterError("config key '" + std::string(key) + "': bad number '" + v + "'");
  }
  return d;
}

std::size_t to_size(std::string_view key, std::string_view value) {
  const double d = to_double(key, value);
  if (d < 0 || d != std::floor(d)) {
    throw ParameterError("config key '" + std::string(key) + "': expected a nonnegative integer");
  }
  return static_cast<std::size_t>(d);
}

}  // namespace

void PipelineConfig::set(std::string_view key_in, std::string_view value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  if (key == "lambda") {
    lambda = to_double(key, value);
  } else if (key == "smoothing") {
    // Filter name "U<Rt><Rf>", e.g. U37.
    if (value.size() != 3 || (value[0] != 'U' && value[0] != 'u') ||
        !std::isdigit(static_cast<unsigned char>(value[1])) ||
        !std::isdigit(static_cast<unsigned char>(value[2]))) {
      throw ParameterError("smoothing expects a filter name like U37");
    }
    smoothing_rt = static_cast<std::size_t>(value[1] - '0');
    smoothing_rf = static_cast<std::size_t>(value[2] - '0');
  } else if (key == "smoothing_rt") {
    smoothing_rt = to_size(key, value);
  } else if (key == "smoothing_rf") {
    smoothing_rf = to_size(key, value);
  } else if (key == "f_low_hz") {
    f_low_hz = to_double(key, value);
  } else if (key == "f_high_hz") {
    f_high_hz = to_double(key, value);
  } else if (key == "interval_ms") {
    interval_ms = to_double(key, value);
  } else if (key == "grid_resolution_deg") {
    grid_resolution_deg = to_double(key, value);
  } else if (key == "cluster_delta_deg") {
    cluster_delta_deg = static_cast<int>(to_size(key, value));
  } else if (key == "udm_thr") {
    udm.thr = to_double(key, value);
  } else if (key == "udm_delta_near_deg") {
    udm.delta_near_deg = to_double(key, value);
  } else if (key == "udm_delta_far_deg") {
    udm.delta_far_deg = to_double(key, value);
  } else if (key == "udm_rank_scope") {
    udm.scope = parse_rank_scope(value);
  } else if (key == "weight_mode") {
    weight_mode = parse_weight_mode(value);
  } else if (key == "quality_mode") {
    quality_mode = parse_quality_mode(value);
  } else if (key == "zeta_deg") {
    zeta_deg = to_double(key, value);
  } else if (key == "outlier_threshold_deg") {
    outlier_threshold_deg = to_double(key, value);
  } else if (key == "low_error_threshold_deg") {
    low_error_threshold_deg = to_double(key, value);
  } else if (key == "q_cap") {
    quality_cap = to_double(key, value);
  } else if (key == "speed_of_sound") {
    speed_of_sound = to_double(key, value);
  } else if (key == "sample_rate_hz") {
    stft.sample_rate_hz = to_double(key, value);
  } else if (key == "nfft") {
    stft.nfft = to_size(key, value);
  } else if (key == "hop") {
    stft.hop = to_size(key, value);
  } else if (key == "window") {
    stft.window = parse_window_kind(value);
  } else {
    throw ParameterError("unknown config key '" + key + "'");
  }
}

void PipelineConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  if (smoothing_rt == 0 || smoothing_rf == 0 || smoothing_rt % 2 == 0 || smoothing_rf % 2 == 0) {
    throw ParameterError("smoothing window sizes must be odd and >= 1");
  }
  if (!(f_low_hz >= 0.0 && f_low_hz < f_high_hz)) {
    throw ParameterError("need 0 <= f_low_hz < f_high_hz");
  }
  if (!(interval_ms > 0.0)) throw ParameterError("interval_ms must be > 0");
  if (!(grid_resolution_deg > 0.0 && grid_resolution_deg <= 90.0)) {
    throw ParameterError("grid_resolution_deg must lie in (0, 90]");
  }
  if (cluster_delta_deg < 1) throw ParameterError("cluster_delta_deg must be >= 1");
  udm.validate();
  if (!(zeta_deg > 0.0)) throw ParameterError("zeta_deg must be > 0");
  if (!(outlier_threshold_deg > 0.0)) throw ParameterError("outlier_threshold_deg must be > 0");
  if (!(low_error_threshold_deg > 0.0)) throw ParameterError("low_error_threshold_deg must be > 0");
  if (!(quality_cap >= 1.0)) throw ParameterError("q_cap must be >= 1");
  if (!(speed_of_sound > 0.0)) throw ParameterError("speed_of_sound must be > 0");
  if (!(stft.sample_rate_hz > 0.0)) throw ParameterError("sample_rate_hz must be > 0");
  if (stft.nfft < 2 || stft.nfft % 2 != 0) throw ParameterError("nfft must be even and >= 2");
  if (stft.hop == 0) throw ParameterError("hop must be >= 1");
  if (f_high_hz > stft.sample_rate_hz / 2.0) throw ParameterError("f_high_hz exceeds Nyquist");
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::key_values() const {
  using container::format_number;
  return {
      {"lambda", format_number(lambda)},
      {"smoothing_rt", std::to_string(smoothing_rt)},
      {"smoothing_rf", std::to_string(smoothing_rf)},
      {"f_low_hz", format_number(f_low_hz)},
      {"f_high_hz", format_number(f_high_hz)},
      {"interval_ms", format_number(interval_ms)},
      {"grid_resolution_deg", format_number(grid_resolution_deg)},
      {"cluster_delta_deg", std::to_string(cluster_delta_deg)},
      {"udm_thr", format_number(udm.thr)},
      {"udm_delta_near_deg", format_number(udm.delta_near_deg)},
      {"udm_delta_far_deg", format_number(udm.delta_far_deg)},
      {"udm_rank_scope", std::string(to_string(udm.scope))},
      {"weight_mode", std::string(to_string(weight_mode))},
      {"quality_mode", std::string(to_string(quality_mode))},
      {"zeta_deg", format_number(zeta_deg)},
      {"outlier_threshold_deg", format_number(outlier_threshold_deg)},
      {"low_error_threshold_deg", format_number(low_error_threshold_deg)},
      {"q_cap", format_number(quality_cap)},
      {"speed_of_sound", format_number(speed_of_sound)},
      {"sample_rate_hz", format_number(stft.sample_rate_hz)},
      {"nfft", std::to_string(stft.nfft)},
      {"hop", std::to_string(stft.hop)},
      {"window", std::string(to_string(stft.window))},
  };
}

PipelineConfig parse_pipeline_config(std::string_view text, PipelineConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
  }
  base.validate();
  return base;
}

PipelineConfig load_pipeline_config(const std::string& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pipeline_config(ss.str(), std::move(base));
}

}  // namespace lsdd
