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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "container.hpp"
#include "json.hpp"
#include "lsdd/angles.hpp"
#include "lsdd/error.hpp"
#include "lsdd/pipeline.hpp"

namespace lsdd {

namespace {

double sample_clamped(const Trajectory& traj, double t) {
  if (traj.keyframes().size() >= 2) t = std::clamp(t, traj.start_s(), traj.end_s());
  return traj.sample(t);
}

const std::vector<int>& percent_lattice() {
  static const std::vector<int> lattice{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  return lattice;
}

}  // namespace

std::pair<std::optional<double>, std::optional<double>> subset_metrics(
    const std::vector<double>& errors, const std::vector<std::size_t>& order,
    double percent, double outlier_threshold_deg) {
  if (errors.empty()) return {std::nullopt, std::nullopt};
  const auto n = static_cast<double>(errors.size());
  auto count = static_cast<std::size_t>(std::llround(percent * n / 100.0));
  count = std::clamp<std::size_t>(count, 1, errors.size());
  double sum = 0.0;
  std::size_t outliers = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double e = errors[order[i]];
    sum += e;
    if (e > outlier_threshold_deg) ++outliers;
  }
  return {sum / static_cast<double>(count),
          static_cast<double>(outliers) / static_cast<double>(count)};
}

std::vector<std::size_t> selection_order(const std::vector<EvalRow>& rows, QualityMode mode) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (mode == QualityMode::kNew) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rows[a].quality_new > rows[b].quality_new;
    });
  } else if (mode == QualityMode::kIdeal) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rows[a].error_deg < rows[b].error_deg;
    });
  }
  return order;
}

Curve make_curve(const std::vector<EvalRow>& rows, QualityMode mode,
                 double outlier_threshold_deg) {
  std::vector<double> errors;
  for (const auto& r : rows) errors.push_back(r.error_deg);
  const auto order = selection_order(rows, mode);
  Curve c;
  for (int p : percent_lattice()) {
    const auto [mean, outliers] = subset_metrics(errors, order, p, outlier_threshold_deg);
    c.percent.push_back(p);
    c.mean_error.push_back(mean);
    c.outlier_fraction.push_back(outliers);
  }
  return c;
}

EvalReport evaluate(const EstimationResult& results, const GroundTruth& truth,
                    const PipelineConfig& config) {
  EvalReport report;
  report.config = config.key_values();
  std::size_t with_valid = 0;
  double n_low_sum = 0.0;
  std::size_t n_low_count = 0;

  for (const auto& res : results.intervals) {
    const auto& iv = res.interval;
    if (!iv.active) continue;
    ++report.active_intervals;
    if (res.valid_bins > 0) ++with_valid;

    std::vector<const SpeakerTrack*> speakers;
    for (const auto& id : iv.speaker_ids) {
      const SpeakerTrack* s = truth.find(id);
      if (!s || s->azimuth.empty()) {
        throw ParameterError("no ground-truth azimuth for speaker '" + id + "'");
      }
      speakers.push_back(s);
    }

    if (!res.bins.empty()) {
      std::size_t low = 0;
      for (const auto& b : res.bins) {
        const double time = results.frame_times_s.at(b.t);
        double eps = std::numeric_limits<double>::infinity();
        for (const auto* s : speakers) {
          eps = std::min(eps, angles::circular_distance(sample_clamped(s->azimuth, time),
                                                        b.theta_hat_deg));
        }
        if (eps <= config.low_error_threshold_deg) ++low;
      }
      n_low_sum += static_cast<double>(low) / static_cast<double>(res.bins.size());
      ++n_low_count;
    }

    if (res.clusters.empty()) {
      ++report.intervals_without_clusters;
      report.missed_speakers += speakers.size();
      continue;
    }

    std::vector<double> weights;
    for (const auto& c : res.clusters) weights.push_back(c.weight);
    const auto q_new = quality(weights, config.quality_cap);

    std::vector<std::size_t> defined;
    for (std::size_t k = 0; k + 1 < res.clusters.size() && k < speakers.size(); ++k) {
      if (res.clusters[k].defined) defined.push_back(k);
    }
    std::vector<double> psi;
    for (const auto* s : speakers) psi.push_back(sample_clamped(s->azimuth, iv.mid_s));

    // Exhaustive minimum-cost matching of clusters onto speakers.
    std::vector<std::size_t> perm(speakers.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::size_t> best;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (std::size_t j = 0; j < defined.size(); ++j) {
        cost += angles::circular_distance(res.clusters[defined[j]].theta_hat_deg, psi[perm[j]]);
      }
      if (cost < best_cost) {
        best_cost = cost;
        best.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(defined.size()));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));

    report.missed_speakers += speakers.size() - defined.size();
    for (std::size_t j = 0; j < defined.size(); ++j) {
      const auto& c = res.clusters[defined[j]];
      EvalRow row;
      row.t_mid_s = iv.mid_s;
      row.k = c.k;
      row.speaker_id = speakers[best[j]]->id;
      row.theta_hat_deg = c.theta_hat_deg;
      row.quality = config.quality_mode == QualityMode::kBase ? 1.0 : q_new[defined[j]];
      row.quality_new = q_new[defined[j]];
      row.psi_deg = psi[best[j]];
      row.error_deg = angles::circular_distance(c.theta_hat_deg, row.psi_deg);
      row.valid_bins = res.valid_bins;
      report.rows.push_back(std::move(row));
    }
  }

  if (report.active_intervals > 0) {
    report.pr = static_cast<double>(with_valid) / static_cast<double>(report.active_intervals);
  }
  if (n_low_count > 0) report.n_low_mean = n_low_sum / static_cast<double>(n_low_count);
  report.curve = make_curve(report.rows, config.quality_mode, config.outlier_threshold_deg);
  for (auto mode : {QualityMode::kBase, QualityMode::kNew, QualityMode::kIdeal}) {
    report.curves_by_mode[std::string(to_string(mode))] =
        make_curve(report.rows, mode, config.outlier_threshold_deg);
  }
  std::vector<Trajectory> trajectories;
  for (const auto& s : truth.speakers) {
    if (!s.azimuth.empty()) trajectories.push_back(s.azimuth);
  }
  report.dynamic = classify_dynamic(trajectories, truth.duration_s,
                                    {100.0, 300.0, 500.0, 1000.0, 5000.0},
                                    {3.0, 5.0, 7.0, 10.0});
  return report;
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

using ordered_json = nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json curve_json(const Curve& c) {
  const bool empty = std::none_of(c.mean_error.begin(), c.mean_error.end(),
                                  [](const auto& v) { return v.has_value(); });
  if (empty) return nullptr;
  ordered_json j;
  j["percent"] = c.percent;
  ordered_json mean = ordered_json::array();
  ordered_json outl = ordered_json::array();
  for (std::size_t i = 0; i < c.percent.size(); ++i) {
    mean.push_back(optional_number(c.mean_error[i]));
    outl.push_back(optional_number(c.outlier_fraction[i]));
  }
  j["mean_abs_error_deg"] = mean;
  j["outlier_fraction"] = outl;
  return j;
}

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::string out = "T_s,k,theta_hat_deg,Q,psi_deg,error_deg,valid_bin_count,speaker_id\n";
  for (const auto& r : report.rows) {
    out += fmt("%.6f", r.t_mid_s) + ',' + std::to_string(r.k) + ',' +
           fmt("%.6f", r.theta_hat_deg) + ',' + fmt("%.6g", r.quality) + ',' +
           fmt("%.6f", r.psi_deg) + ',' + fmt("%.6f", r.error_deg) + ',' +
           std::to_string(r.valid_bins) + ',' + r.speaker_id + '\n';
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  ordered_json j;
  ordered_json cfg;
  for (const auto& [k, v] : report.config) cfg[k] = v;
  j["config"] = cfg;
  j["active_intervals"] = report.active_intervals;
  j["rows"] = report.rows.size();
  j["pr"] = optional_number(report.pr);
  j["n_low_mean"] = optional_number(report.n_low_mean);
  j["intervals_without_clusters"] = report.intervals_without_clusters;
  j["missed_speakers"] = report.missed_speakers;
  j["curve"] = curve_json(report.curve);
  ordered_json by_mode;
  for (const char* mode : {"base", "new", "ideal"}) {
    const auto it = report.curves_by_mode.find(mode);
    by_mode[mode] = it == report.curves_by_mode.end() ? ordered_json(nullptr) : curve_json(it->second);
  }
  j["curves_by_quality_mode"] = by_mode;
  ordered_json dyn;
  dyn["interval_ms"] = report.dynamic.interval_ms;
  dyn["zeta_deg"] = report.dynamic.zeta_deg;
  dyn["percent"] = report.dynamic.percent;
  j["dynamic_intervals"] = dyn;
  return j.dump(2) + '\n';
}

void emit_report(const EvalReport& report, const std::string& csv_path,
                 const std::string& json_path) {
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
  };
  write(csv_path, report_csv(report));
  write(json_path, report_json(report));
}

std::string estimates_csv(const EstimationResult& results) {
  std::string out =
      "interval,T_s,K,k,center_deg,theta_hat_deg,weight,quality,defined,valid_bin_count\n";
  for (const auto& res : results.intervals) {
    for (const auto& c : res.clusters) {
      out += std::to_string(res.interval.index) + ',' + container::format_number(res.interval.mid_s) + ',' +
             std::to_string(res.interval.speakers) + ',' + std::to_string(c.k) + ',' +
             std::to_string(c.center_deg) + ',' + container::format_number(c.theta_hat_deg) + ',' +
             container::format_number(c.weight) + ',' + container::format_number(c.quality) + ',' +
             (c.defined ? "1" : "0") + ',' + std::to_string(res.valid_bins) + '\n';
    }
  }
  return out;
}

EstimationResult parse_estimates_csv(std::string_view text,
                                     const std::vector<IntervalRecord>& intervals) {
  EstimationResult out;
  out.intervals.resize(intervals.size());
  std::vector<std::size_t> slot(intervals.empty() ? 0 : intervals.back().index + 1, SIZE_MAX);
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    out.intervals[i].interval = intervals[i];
    if (intervals[i].index >= slot.size()) slot.resize(intervals[i].index + 1, SIZE_MAX);
    slot[intervals[i].index] = i;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 10) {
      throw FormatError("estimates line " + std::to_string(lineno) + ": expected 10 fields");
    }
    try {
      const auto index = std::stoull(f[0]);
      if (index >= slot.size() || slot[index] == SIZE_MAX) {
        throw FormatError("estimates line " + std::to_string(lineno) +
                          ": interval not present in the metadata");
      }
      auto& res = out.intervals[slot[index]];
      ClusterResult c;
      c.k = std::stoull(f[3]);
      c.center_deg = std::stoi(f[4]);
      c.theta_hat_deg = std::stod(f[5]);
      c.weight = std::stod(f[6]);
      c.quality = std::stod(f[7]);
      c.defined = f[8] == "1";
      res.valid_bins = std::stoull(f[9]);
      res.clusters.push_back(c);
    } catch (const std::logic_error&) {
      throw FormatError("estimates line " + std::to_string(lineno) + ": bad number");
    }
  }
  return out;
}

}  // namespace lsdd
