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

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "lsdd/array_model.hpp"
#include "lsdd/clustering.hpp"
#include "lsdd/error.hpp"
#include "lsdd/io.hpp"
#include "lsdd/lsdd_core.hpp"
#include "lsdd/pipeline.hpp"
#include "lsdd/scene.hpp"
#include "lsdd/timeline.hpp"
#include "lsdd/udm.hpp"

namespace py = pybind11;
using namespace lsdd;

namespace {

using CArray = py::array_t<cdouble, py::array::c_style | py::array::forcecast>;
using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<T> to_numpy(const std::vector<T>& data, std::vector<py::ssize_t> shape) {
  py::array_t<T> out(shape);
  std::memcpy(out.mutable_data(), data.data(), data.size() * sizeof(T));
  return out;
}

Tensor3<cdouble> from_numpy3(const CArray& a) {
  if (a.ndim() != 3) throw ParameterError("expected a 3-D complex array");
  Tensor3<cdouble> t(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                     static_cast<std::size_t>(a.shape(2)));
  std::memcpy(t.data().data(), a.data(), t.data().size() * sizeof(cdouble));
  return t;
}

py::array_t<cdouble> tensor_array(const Tensor3<cdouble>& t) {
  return to_numpy(t.data(), {static_cast<py::ssize_t>(t.dim(0)), static_cast<py::ssize_t>(t.dim(1)),
                             static_cast<py::ssize_t>(t.dim(2))});
}

ArrayGeometry geometry_from(const DArray& positions, const std::string& label) {
  if (positions.ndim() != 2 || positions.shape(1) != 3) {
    throw ParameterError("mic positions must have shape (M, 3)");
  }
  std::vector<Position> mics;
  for (py::ssize_t m = 0; m < positions.shape(0); ++m) {
    mics.push_back({positions.at(m, 0), positions.at(m, 1), positions.at(m, 2)});
  }
  return ArrayGeometry(std::move(mics), label);
}

StftTensor stft_from(const CArray& values, const StftParams& params) {
  auto t = make_stft_tensor(static_cast<std::size_t>(values.shape(0)),
                            static_cast<std::size_t>(values.shape(1)), params);
  if (values.ndim() != 3 || static_cast<std::size_t>(values.shape(2)) != t.bin_count()) {
    throw ParameterError("STFT array must have shape (mics, frames, nfft/2 + 1)");
  }
  std::memcpy(t.values.data().data(), values.data(), t.values.data().size() * sizeof(cdouble));
  return t;
}

py::dict cluster_dict(const ClusterResult& c) {
  py::dict d;
  d["k"] = c.k;
  d["center_deg"] = c.center_deg;
  d["theta_hat_deg"] = c.defined ? py::cast(c.theta_hat_deg) : py::none();
  d["weight"] = c.weight;
  d["member_count"] = c.member_count;
  d["quality"] = c.quality;
  d["defined"] = c.defined;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lsdd, m) {
  m.doc() = "Multi-speaker DOA estimation with reliability-weighted clustering";

  static py::exception<Error> base_error(m, "LsddError");
  static py::exception<ParameterError> parameter_error(m, "ParameterError", PyExc_ValueError);
  static py::exception<FormatError> format_error(m, "FormatError", PyExc_ValueError);
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParameterError& e) {
      parameter_error(e.what());
    } catch (const FormatError& e) {
      format_error(e.what());
    } catch (const IoError& e) {
      io_error(e.what());
    } catch (const Error& e) {
      base_error(e.what());
    }
  });

  m.def("ring", [](std::size_t mics, double radius) {
    const auto g = ArrayGeometry::ring(mics, radius);
    std::vector<double> flat;
    for (const auto& p : g.positions()) flat.insert(flat.end(), p.begin(), p.end());
    return to_numpy(flat, {static_cast<py::ssize_t>(mics), 3});
  }, py::arg("mics"), py::arg("radius_m"), "Mic positions (M, 3) of a horizontal ring.");

  m.def("direction_grid", [](double resolution) { return build_direction_grid(resolution).azimuths(); },
        py::arg("resolution_deg") = 1.0);

  py::class_<SteeringVectorSet>(m, "SteeringSet")
      .def(py::init([](const CArray& values, std::vector<double> freqs, std::vector<double> azimuths,
                       std::string label) {
             return SteeringVectorSet(from_numpy3(values), std::move(freqs),
                                      DirectionGrid(std::move(azimuths)), std::move(label));
           }),
           py::arg("values"), py::arg("freqs_hz"), py::arg("azimuths_deg"), py::arg("label") = "")
      .def_property_readonly("values", [](const SteeringVectorSet& s) { return tensor_array(s.values()); })
      .def_property_readonly("freqs_hz", &SteeringVectorSet::freqs_hz)
      .def_property_readonly("azimuths_deg", [](const SteeringVectorSet& s) { return s.grid().azimuths(); })
      .def_property_readonly("label", &SteeringVectorSet::geometry_label)
      .def("save", [](const SteeringVectorSet& s, const std::string& path) { save_steering_set(s, path); })
      .def_static("load", [](const std::string& path) { return load_steering_set(path); });

  m.def("free_field_steering",
        [](const DArray& positions, const std::vector<double>& azimuths, const std::vector<double>& freqs,
           double c, const std::string& label) {
          return free_field_steering(geometry_from(positions, label), DirectionGrid(azimuths), freqs, c);
        },
        py::arg("mic_positions"), py::arg("azimuths_deg"), py::arg("freqs_hz"),
        py::arg("speed_of_sound") = kDefaultSpeedOfSound, py::arg("label") = "");

  m.def("cosine_similarity", [](const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    return cosine_similarity(a, b);
  });

  py::class_<Udm>(m, "Udm")
      .def_property_readonly("xi_map", [](const Udm& u) {
        return to_numpy(u.xi_map.data(), {static_cast<py::ssize_t>(u.xi_map.rows()),
                                          static_cast<py::ssize_t>(u.xi_map.cols())});
      })
      .def_property_readonly("freqs_hz", [](const Udm& u) { return u.freqs_hz; })
      .def_property_readonly("azimuths_deg", [](const Udm& u) { return u.grid.azimuths(); })
      .def("save", [](const Udm& u, const std::string& path) { save_udm(u, path); })
      .def_static("load", [](const std::string& path) { return load_udm(path); });

  m.def("build_udm",
        [](const SteeringVectorSet& steering, double thr, double near, double far, const std::string& scope,
           double f_low, double f_high) {
          UdmParams p;
          p.thr = thr;
          p.delta_near_deg = near;
          p.delta_far_deg = far;
          p.scope = parse_rank_scope(scope);
          return build_udm(steering, p, f_low, f_high);
        },
        py::arg("steering"), py::arg("thr") = 0.85, py::arg("delta_near_deg") = 10.0,
        py::arg("delta_far_deg") = 25.0, py::arg("scope") = "global", py::arg("f_low_hz") = 1500.0,
        py::arg("f_high_hz") = 3500.0);

  m.def("cluster_interval",
        [](const std::vector<double>& thetas, const std::vector<double>& weights, std::size_t speakers,
           int delta, double cap) {
          if (thetas.size() != weights.size()) throw ParameterError("thetas and weights differ in length");
          std::vector<WeightedEstimate> est;
          for (std::size_t i = 0; i < thetas.size(); ++i) est.push_back({thetas[i], weights[i]});
          py::list out;
          for (const auto& c : cluster_interval(est, speakers, delta, cap)) out.append(cluster_dict(c));
          return out;
        },
        py::arg("thetas_deg"), py::arg("weights"), py::arg("speakers"), py::arg("delta_deg") = 10,
        py::arg("quality_cap") = kDefaultQualityCap);

  py::class_<Scene>(m, "Scene")
      .def_property_readonly("stft", [](const Scene& s) { return tensor_array(s.stft.values); })
      .def_property_readonly("frame_times_s", [](const Scene& s) { return s.stft.frame_times_s; })
      .def_property_readonly("pose_vad", [](const Scene& s) { return format_pose_vad(s.truth.ground_truth()); });

  m.def("simulate",
        [](const std::string& scene_json) {
          const auto cfg = parse_scene_config(scene_json);
          std::vector<double> freqs;
          for (std::size_t f = 0; f < cfg.stft.bin_count(); ++f) freqs.push_back(cfg.stft.bin_freq_hz(f));
          auto steering = free_field_steering(cfg.geometry, build_direction_grid(cfg.grid_resolution_deg),
                                              freqs, cfg.speed_of_sound);
          auto scene = synthesize_stft(cfg.spec, steering, cfg.stft);
          return py::make_tuple(std::move(scene), std::move(steering));
        },
        py::arg("scene_json"),
        "Synthesizes a scene from its JSON description. Returns (Scene, SteeringSet).");

  m.def("estimate",
        [](const std::string& config_text, const SteeringVectorSet& steering, const Udm* udm,
           const CArray& stft, const std::string& pose_vad) {
          const auto cfg = parse_pipeline_config(config_text);
          const auto x = stft_from(stft, cfg.stft);
          const auto truth = parse_pose_vad_text(pose_vad);
          const auto intervals = segment_intervals(truth, cfg.interval_ms / 1000.0, cfg.zeta_deg);
          std::vector<double> yaw;
          for (double t : x.frame_times_s) yaw.push_back(truth.yaw_at(t));
          const auto res = run_estimation(cfg, steering, udm, x, intervals, yaw);
          const auto report = evaluate(res, truth, cfg);
          py::dict out;
          out["csv"] = report_csv(report);
          out["json"] = report_json(report);
          out["estimates"] = estimates_csv(res);
          return out;
        },
        py::arg("config"), py::arg("steering"), py::arg("udm"), py::arg("stft"), py::arg("pose_vad"),
        "Runs estimation and evaluation. Returns the CSV, JSON and raw estimates as text.");

  m.def("pipeline_config", [](const std::string& text) {
    return parse_pipeline_config(text).key_values();
  }, py::arg("text") = "", "Parses a config and returns every (key, value) after defaults.");
}
