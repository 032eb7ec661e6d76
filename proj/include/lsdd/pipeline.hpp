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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lsdd/array_model.hpp"
#include "lsdd/clustering.hpp"
#include "lsdd/lsdd_core.hpp"
#include "lsdd/stft.hpp"
#include "lsdd/timeline.hpp"
#include "lsdd/udm.hpp"

namespace lsdd {

enum class WeightMode { kBase, kNew };
enum class QualityMode { kBase, kNew, kIdeal };

WeightMode parse_weight_mode(std::string_view name);
QualityMode parse_quality_mode(std::string_view name);
std::string_view to_string(WeightMode mode);
std::string_view to_string(QualityMode mode);

// Every tunable of the estimator and evaluator. Keys of the flat config
// file map one-to-one onto these fields (see key_values()).
struct PipelineConfig {
  double lambda = 0.7;
  std::size_t smoothing_rt = 3;  // U37
  std::size_t smoothing_rf = 7;
  double f_low_hz = 1500.0;
  double f_high_hz = 3500.0;
  double interval_ms = 500.0;
  double grid_resolution_deg = 1.0;
  int cluster_delta_deg = 10;
  UdmParams udm;
  WeightMode weight_mode = WeightMode::kNew;
  QualityMode quality_mode = QualityMode::kNew;
  double zeta_deg = 5.0;
  double outlier_threshold_deg = 25.0;
  double low_error_threshold_deg = 10.0;
  double quality_cap = kDefaultQualityCap;
  double speed_of_sound = kDefaultSpeedOfSound;
  StftParams stft;

  // Sets one field from its config-file key. ParameterError on an unknown
  // key or a bad value. "smoothing" accepts filter names such as U37.
  void set(std::string_view key, std::string_view value);
  void validate() const;
  // (key, value) pairs in a fixed order, as written back to files.
  std::vector<std::pair<std::string, std::string>> key_values() const;
};

// Flat "key = value" text; '#' starts a comment.
PipelineConfig parse_pipeline_config(std::string_view text,
                                     PipelineConfig base = PipelineConfig{});
PipelineConfig load_pipeline_config(const std::string& path,
                                    PipelineConfig base = PipelineConfig{});

struct BinSample {
  std::size_t t = 0;
  double theta_hat_deg = 0.0;
  double w = 0.0;
};

struct IntervalResult {
  IntervalRecord interval;
  std::size_t valid_bins = 0;
  // K+1 clusters for active intervals with valid bins, otherwise empty.
  std::vector<ClusterResult> clusters;
  std::vector<BinSample> bins;  // valid bins inside the interval
};

struct EstimationResult {
  std::vector<IntervalResult> intervals;
  std::vector<double> frame_times_s;
  std::size_t total_bins = 0;
  std::size_t valid_bins = 0;
};

// Spectrum, smoothing, per-bin DOA and validity, weighting, and per-interval
// subtractive clustering. `udm` is required for WeightMode::kNew.
// `frame_yaw_deg`, when non-empty, gives delta_array per STFT frame;
// otherwise each interval's delta_array_deg is used.
EstimationResult run_estimation(const PipelineConfig& config,
                                const SteeringVectorSet& steering,
                                const Udm* udm, const StftTensor& stft,
                                const std::vector<IntervalRecord>& intervals,
                                const std::vector<double>& frame_yaw_deg = {});

// Per-bin weights alone, exposed for tests and bindings.
void apply_weights(std::vector<BinEstimate>& bins, WeightMode mode, const Udm* udm,
                   const StftTensor& stft);

struct EvalRow {
  double t_mid_s = 0.0;
  std::size_t k = 0;
  std::string speaker_id;
  double theta_hat_deg = 0.0;
  double quality = 0.0;      // as reported by the configured quality mode
  double quality_new = 0.0;  // W_k / W_{K+1}
  double psi_deg = 0.0;
  double error_deg = 0.0;
  std::size_t valid_bins = 0;
};

struct Curve {
  std::vector<int> percent;  // 10, 20, ..., 100
  std::vector<std::optional<double>> mean_error;
  std::vector<std::optional<double>> outlier_fraction;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  Curve curve;  // subsets chosen by the configured quality mode
  std::map<std::string, Curve> curves_by_mode;  // "base", "new", "ideal"
  std::optional<double> pr;
  std::optional<double> n_low_mean;
  std::size_t active_intervals = 0;
  std::size_t intervals_without_clusters = 0;
  std::size_t missed_speakers = 0;
  DynamicTable dynamic;
  std::vector<std::pair<std::string, std::string>> config;
};

// Subset metrics for one selection order. Takes the first
// max(1, round(P * n / 100)) rows of `order`.
std::pair<std::optional<double>, std::optional<double>> subset_metrics(
    const std::vector<double>& errors, const std::vector<std::size_t>& order,
    double percent, double outlier_threshold_deg);

// Row orders: base keeps input order, new sorts by descending quality_new
// (stable), ideal sorts by ascending error (stable).
std::vector<std::size_t> selection_order(const std::vector<EvalRow>& rows, QualityMode mode);
Curve make_curve(const std::vector<EvalRow>& rows, QualityMode mode,
                 double outlier_threshold_deg);

// Matches the first K clusters of each active interval to its true
// speakers by minimum total circular error, then aggregates.
EvalReport evaluate(const EstimationResult& results, const GroundTruth& truth,
                    const PipelineConfig& config);

// CSV rows plus a JSON summary. Same report, same bytes.
void emit_report(const EvalReport& report, const std::string& csv_path,
                 const std::string& json_path);
std::string report_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);

// Raw per-cluster estimates, re-scorable later with evaluate.
std::string estimates_csv(const EstimationResult& results);
EstimationResult parse_estimates_csv(std::string_view text,
                                     const std::vector<IntervalRecord>& intervals);

}  // namespace lsdd
