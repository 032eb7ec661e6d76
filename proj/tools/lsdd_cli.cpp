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

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "lsdd/error.hpp"
#include "lsdd/io.hpp"
#include "lsdd/pipeline.hpp"
#include "lsdd/scene.hpp"
#include "lsdd/udm.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;

struct PipelineArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string steering;
  std::string udm;
  std::string audio;
  std::vector<std::string> meta;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& a, bool needs_audio) {
  cmd->add_option("--config", a.config, "pipeline config (key = value)");
  cmd->add_option("--set", a.overrides, "override a config key, key=value")->take_all();
  if (needs_audio) {
    cmd->add_option("--steering", a.steering, "steering container")->required();
    cmd->add_option("--udm", a.udm, "precomputed UDM");
    cmd->add_option("--audio", a.audio, "multichannel WAV or STFT tensor")->required();
  }
  cmd->add_option("--meta", a.meta, "pose/VAD files")->required();
}

lsdd::PipelineConfig load_config(const PipelineArgs& a) {
  lsdd::PipelineConfig cfg;
  if (!a.config.empty()) cfg = lsdd::load_pipeline_config(a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw lsdd::ParameterError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

bool is_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in && std::string(magic, 4) == "RIFF";
}

lsdd::StftTensor load_audio(const std::string& path, const lsdd::PipelineConfig& cfg,
                            std::size_t mics) {
  if (!fs::exists(path)) throw lsdd::IoError("cannot open " + path);
  lsdd::StftTensor stft;
  if (is_wav(path)) {
    auto audio = lsdd::ingest_wav(path, mics);
    if (audio.sample_rate_hz != cfg.stft.sample_rate_hz) {
      throw lsdd::ParameterError("audio rate " + std::to_string(audio.sample_rate_hz) +
                                 " Hz does not match sample_rate_hz in the config");
    }
    stft = lsdd::analyze(audio.channels, cfg.stft);
  } else {
    stft = lsdd::load_stft_tensor(path);
  }
  if (stft.mic_count() != mics) {
    throw lsdd::ParameterError("audio has " + std::to_string(stft.mic_count()) +
                               " channels, steering set has " + std::to_string(mics));
  }
  return stft;
}

struct Inputs {
  lsdd::PipelineConfig config;
  std::optional<lsdd::SteeringVectorSet> steering;
  std::optional<lsdd::Udm> udm;
  bool udm_from_file = false;
  lsdd::StftTensor stft;
  lsdd::GroundTruth truth;
};

Inputs load_inputs(const PipelineArgs& a) {
  Inputs in;
  in.config = load_config(a);
  in.steering.emplace(lsdd::load_steering_set(a.steering));
  if (!a.udm.empty()) {
    in.udm.emplace(lsdd::load_udm(a.udm));
    in.udm_from_file = true;
  }
  in.stft = load_audio(a.audio, in.config, in.steering->mic_count());
  std::vector<fs::path> meta(a.meta.begin(), a.meta.end());
  in.truth = lsdd::parse_pose_vad(meta);
  for (const auto& w : in.truth.warnings) std::cerr << "warning: " << w << '\n';
  if (in.truth.duration_s <= 0.0 && in.stft.frame_count() > 0) {
    const auto& p = in.stft.params;
    in.truth.duration_s = static_cast<double>((in.stft.frame_count() - 1) * p.hop + p.nfft) /
                          p.sample_rate_hz;
  }
  return in;
}

const lsdd::Udm* ensure_udm(Inputs& in) {
  if (in.config.weight_mode != lsdd::WeightMode::kNew) return nullptr;
  if (!in.udm_from_file) {
    const auto& p = in.config.udm;
    if (!in.udm || in.udm->params.thr != p.thr || in.udm->params.delta_near_deg != p.delta_near_deg ||
        in.udm->params.delta_far_deg != p.delta_far_deg || in.udm->params.scope != p.scope) {
      in.udm.emplace(lsdd::build_udm(*in.steering, p, in.config.f_low_hz, in.config.f_high_hz));
    }
  }
  return &*in.udm;
}

std::vector<lsdd::IntervalRecord> intervals_for(const Inputs& in) {
  return lsdd::segment_intervals(in.truth, in.config.interval_ms / 1000.0, in.config.zeta_deg);
}

lsdd::EstimationResult estimate(Inputs& in) {
  const lsdd::Udm* udm = ensure_udm(in);
  std::vector<double> yaw;
  for (double t : in.stft.frame_times_s) yaw.push_back(in.truth.yaw_at(t));
  return lsdd::run_estimation(in.config, *in.steering, udm, in.stft, intervals_for(in), yaw);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw lsdd::IoError("cannot write " + path.string());
  out << text;
  if (!out) throw lsdd::IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lsdd::IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_simulate(const std::string& scene_path, const std::string& out_dir) {
  const auto sc = lsdd::load_scene_config(scene_path);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw lsdd::IoError("cannot create " + out_dir + ": " + ec.message());
  const auto grid = lsdd::build_direction_grid(sc.grid_resolution_deg);
  std::vector<double> freqs;
  for (std::size_t f = 0; f < sc.stft.bin_count(); ++f) freqs.push_back(sc.stft.bin_freq_hz(f));
  const auto steering = lsdd::free_field_steering(sc.geometry, grid, freqs, sc.speed_of_sound);
  const auto scene = lsdd::synthesize_stft(sc.spec, steering, sc.stft);
  const fs::path dir(out_dir);
  lsdd::save_stft_tensor(scene.stft, dir / "stft.lsdd");
  lsdd::save_steering_set(steering, dir / "steering.lsdd");
  lsdd::write_pose_vad(scene.truth.ground_truth(), dir / "meta.txt");
  std::cout << "wrote " << (dir / "stft.lsdd").string() << ", "
            << (dir / "steering.lsdd").string() << ", " << (dir / "meta.txt").string() << '\n';
  return 0;
}

int cmd_udm(const std::string& steering_path, const std::string& out, const std::string& config,
            const std::vector<std::string>& overrides) {
  PipelineArgs a;
  a.config = config;
  a.overrides = overrides;
  const auto cfg = load_config(a);
  const auto steering = lsdd::load_steering_set(steering_path);
  const auto udm = lsdd::build_udm(steering, cfg.udm, cfg.f_low_hz, cfg.f_high_hz);
  lsdd::save_udm(udm, out);
  std::cout << "wrote " << out << " (" << udm.grid.size() << " directions x "
            << udm.freqs_hz.size() << " frequencies)\n";
  return 0;
}

int cmd_estimate(const PipelineArgs& a, const std::string& prefix) {
  auto in = load_inputs(a);
  const auto results = estimate(in);
  const auto report = lsdd::evaluate(results, in.truth, in.config);
  lsdd::emit_report(report, prefix + ".csv", prefix + ".json");
  write_text(prefix + ".estimates.csv", lsdd::estimates_csv(results));
  std::cout << "wrote " << prefix << ".csv, " << prefix << ".json, " << prefix
            << ".estimates.csv\n";
  return 0;
}

int cmd_evaluate(const PipelineArgs& a, const std::string& estimates, const std::string& prefix) {
  const auto cfg = load_config(a);
  std::vector<fs::path> meta(a.meta.begin(), a.meta.end());
  const auto truth = lsdd::parse_pose_vad(meta);
  for (const auto& w : truth.warnings) std::cerr << "warning: " << w << '\n';
  const auto intervals = lsdd::segment_intervals(truth, cfg.interval_ms / 1000.0, cfg.zeta_deg);
  const auto results = lsdd::parse_estimates_csv(read_text(estimates), intervals);
  const auto report = lsdd::evaluate(results, truth, cfg);
  lsdd::emit_report(report, prefix + ".csv", prefix + ".json");
  std::cout << "wrote " << prefix << ".csv, " << prefix << ".json\n";
  return 0;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

int cmd_sweep(const PipelineArgs& a, const std::string& param, const std::string& out) {
  const auto eq = param.find('=');
  if (eq == std::string::npos) throw lsdd::ParameterError("--param expects key=start:step:stop");
  const std::string key = param.substr(0, eq);
  double start = 0, step = 0, stop = 0;
  char tail = 0;
  if (std::sscanf(param.c_str() + eq + 1, "%lf:%lf:%lf%c", &start, &step, &stop, &tail) != 3 ||
      !(step > 0.0) || stop < start) {
    throw lsdd::ParameterError("bad sweep range '" + param.substr(eq + 1) +
                               "', expected start:step:stop with step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  auto in = load_inputs(a);
  const auto base = in.config;
  std::string table = key + ",pr,n_low,rows,misses,mean_err_50,mean_err_100,outliers_50,outliers_100\n";
  for (std::size_t i = 0; i < count; ++i) {
    const double value = start + static_cast<double>(i) * step;
    char vbuf[32];
    std::snprintf(vbuf, sizeof vbuf, "%.6g", value);
    in.config = base;
    in.config.set(key, vbuf);
    in.config.validate();
    const auto report = lsdd::evaluate(estimate(in), in.truth, in.config);
    const auto& c = report.curve;
    table += std::string(vbuf) + ',' + cell(report.pr) + ',' + cell(report.n_low_mean) + ',' +
             std::to_string(report.rows.size()) + ',' + std::to_string(report.missed_speakers) +
             ',' + cell(c.mean_error[4]) + ',' + cell(c.mean_error[9]) + ',' +
             cell(c.outlier_fraction[4]) + ',' + cell(c.outlier_fraction[9]) + '\n';
  }
  if (out.empty()) {
    std::cout << table;
  } else {
    write_text(out, table);
    std::cout << "wrote " << out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-speaker DOA estimation for moving microphone arrays"};
  app.require_subcommand(1);

  std::string scene_path, sim_out;
  auto* sim = app.add_subcommand("simulate", "synthesize a scene into STFT, steering and meta files");
  sim->add_option("scene", scene_path, "scene config (JSON)")->required();
  sim->add_option("-o,--output", sim_out, "output directory")->required();

  std::string udm_steering, udm_out, udm_config;
  std::vector<std::string> udm_overrides;
  auto* udm = app.add_subcommand("udm", "compute the universal directivity map");
  udm->add_option("--steering", udm_steering, "steering container")->required();
  udm->add_option("-o,--output", udm_out, "UDM output file")->required();
  udm->add_option("--config", udm_config, "pipeline config (key = value)");
  udm->add_option("--set", udm_overrides, "override a config key, key=value")->take_all();

  PipelineArgs est_args;
  std::string est_prefix = "report";
  auto* est = app.add_subcommand("estimate", "estimate DOAs and score them against pose/VAD truth");
  add_pipeline_options(est, est_args, true);
  est->add_option("-o,--output", est_prefix, "output prefix for .csv/.json/.estimates.csv");

  PipelineArgs ev_args;
  std::string ev_estimates, ev_prefix = "report";
  auto* ev = app.add_subcommand("evaluate", "re-score an estimates file against truth");
  add_pipeline_options(ev, ev_args, false);
  ev->add_option("--estimates", ev_estimates, "estimates CSV from 'estimate'")->required();
  ev->add_option("-o,--output", ev_prefix, "output prefix for .csv/.json");

  PipelineArgs sw_args;
  std::string sw_param, sw_out;
  auto* sw = app.add_subcommand("sweep", "run the pipeline over a range of one config value");
  add_pipeline_options(sw, sw_args, true);
  sw->add_option("--param", sw_param, "key=start:step:stop")->required();
  sw->add_option("-o,--output", sw_out, "summary CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(scene_path, sim_out);
    if (*udm) return cmd_udm(udm_steering, udm_out, udm_config, udm_overrides);
    if (*est) return cmd_estimate(est_args, est_prefix);
    if (*ev) return cmd_evaluate(ev_args, ev_estimates, ev_prefix);
    if (*sw) return cmd_sweep(sw_args, sw_param, sw_out);
  } catch (const lsdd::Error& e) {
    std::cerr << "lsdd: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "lsdd: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
