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

#include "lsdd/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "container.hpp"
#include "lsdd/angles.hpp"
#include "lsdd/error.hpp"

namespace lsdd {

ArrayGeometry::ArrayGeometry(std::vector<Position> mic_positions,
                             std::string label)
    : positions_(std::move(mic_positions)), label_(std::move(label)) {
  if (positions_.empty()) throw ParameterError("array needs at least one mic");
  for (const auto& p : positions_) {
    for (double c : p) {
      if (!std::isfinite(c)) {
        throw ParameterError("microphone coordinate is not finite");
      }
    }
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    for (std::size_t j = i + 1; j < positions_.size(); ++j) {
      if (positions_[i] == positions_[j]) {
        throw ParameterError("microphones " + std::to_string(i) + " and " +
                             std::to_string(j) + " share a position");
      }
    }
  }
}

ArrayGeometry ArrayGeometry::ring(std::size_t mics, double radius_m,
                                  std::string label) {
  if (mics == 0 || !(radius_m > 0.0)) {
    throw ParameterError("ring array needs mics >= 1 and radius > 0");
  }
  std::vector<Position> pos;
  for (std::size_t m = 0; m < mics; ++m) {
    const double a = 2.0 * angles::kPi * static_cast<double>(m) /
                     static_cast<double>(mics);
    pos.push_back({radius_m * std::cos(a), radius_m * std::sin(a), 0.0});
  }
  if (label.empty()) {
    std::ostringstream os;
    os << "ring" << mics << "_r" << radius_m;
    label = os.str();
  }
  return ArrayGeometry(std::move(pos), std::move(label));
}

ArrayGeometry ArrayGeometry::linear(std::size_t mics, double spacing_m,
                                    std::string label) {
  if (mics == 0 || !(spacing_m > 0.0)) {
    throw ParameterError("linear array needs mics >= 1 and spacing > 0");
  }
  std::vector<Position> pos;
  const double mid = 0.5 * static_cast<double>(mics - 1);
  for (std::size_t m = 0; m < mics; ++m) {
    pos.push_back({(static_cast<double>(m) - mid) * spacing_m, 0.0, 0.0});
  }
  if (label.empty()) {
    std::ostringstream os;
    os << "linear" << mics << "_d" << spacing_m;
    label = os.str();
  }
  return ArrayGeometry(std::move(pos), std::move(label));
}

ArrayGeometry ArrayGeometry::translated(const Position& offset) const {
  auto pos = positions_;
  for (auto& p : pos) {
    for (int i = 0; i < 3; ++i) p[i] += offset[i];
  }
  return ArrayGeometry(std::move(pos), label_);
}

DirectionGrid::DirectionGrid(std::vector<double> azimuths_deg)
    : azimuths_(std::move(azimuths_deg)) {
  if (azimuths_.empty()) throw ParameterError("direction grid is empty");
  for (std::size_t l = 0; l < azimuths_.size(); ++l) {
    const double a = azimuths_[l];
    if (!(a > -180.0 && a <= 180.0)) {
      throw ParameterError("grid azimuth outside (-180, 180]");
    }
    if (l > 0 && !(a > azimuths_[l - 1])) {
      throw ParameterError("grid azimuths must be strictly increasing");
    }
  }
  if (azimuths_.size() == 1) {
    resolution_ = 360.0;
  } else {
    std::vector<double> gaps;
    for (std::size_t l = 1; l < azimuths_.size(); ++l) {
      gaps.push_back(azimuths_[l] - azimuths_[l - 1]);
    }
    gaps.push_back(azimuths_.front() + 360.0 - azimuths_.back());
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    resolution_ = gaps[gaps.size() / 2];
  }
}

std::size_t DirectionGrid::nearest(double azimuth_deg) const {
  const double a = angles::wrap180(azimuth_deg);
  const std::size_t n = azimuths_.size();
  const auto it = std::lower_bound(azimuths_.begin(), azimuths_.end(), a);
  const std::size_t hi = static_cast<std::size_t>(it - azimuths_.begin()) % n;
  const std::size_t lo = (hi + n - 1) % n;
  const double dlo = angles::circular_distance(a, azimuths_[lo]);
  const double dhi = angles::circular_distance(a, azimuths_[hi]);
  if (dlo < dhi) return lo;
  if (dhi < dlo) return hi;
  return std::min(lo, hi);
}

DirectionGrid build_direction_grid(double resolution_deg) {
  if (!(resolution_deg > 0.0) || resolution_deg > 90.0) {
    throw ParameterError("grid resolution must be in (0, 90] degrees");
  }
  const auto count = static_cast<std::size_t>(std::llround(360.0 / resolution_deg));
  const double step = 360.0 / static_cast<double>(count);
  std::vector<double> az(count);
  for (std::size_t l = 0; l < count; ++l) {
    az[l] = 180.0 - static_cast<double>(count - 1 - l) * step;
  }
  return DirectionGrid(std::move(az));
}

SteeringVectorSet::SteeringVectorSet(Tensor3<cdouble> values,
                                     std::vector<double> freqs_hz,
                                     DirectionGrid grid,
                                     std::string geometry_label)
    : values_(std::move(values)),
      freqs_(std::move(freqs_hz)),
      grid_(std::move(grid)),
      label_(std::move(geometry_label)) {
  if (values_.dim(0) != grid_.size() || values_.dim(1) != freqs_.size() ||
      values_.dim(2) == 0 || freqs_.empty()) {
    throw FormatError("steering tensor dimensions do not match grid/freqs");
  }
  for (std::size_t l = 0; l < values_.dim(0); ++l) {
    for (std::size_t f = 0; f < values_.dim(1); ++f) {
      double norm2 = 0.0;
      for (const auto& z : values_.row(l, f)) norm2 += std::norm(z);
      if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw FormatError("zero-norm steering vector at azimuth " +
                          container::format_number(grid_[l]) + " deg, frequency " +
                          container::format_number(freqs_[f]) + " Hz");
      }
    }
  }
}

std::size_t SteeringVectorSet::freq_index(double hz, double tolerance_hz) const {
  std::size_t best = 0;
  for (std::size_t f = 1; f < freqs_.size(); ++f) {
    if (std::fabs(freqs_[f] - hz) < std::fabs(freqs_[best] - hz)) best = f;
  }
  if (std::fabs(freqs_[best] - hz) > tolerance_hz) {
    throw ParameterError("steering set has no frequency near " +
                         container::format_number(hz) + " Hz");
  }
  return best;
}

SteeringVectorSet free_field_steering(const ArrayGeometry& geometry,
                                      const DirectionGrid& grid,
                                      std::span<const double> freqs_hz,
                                      double speed_of_sound) {
  if (!(speed_of_sound > 0.0)) throw ParameterError("speed of sound must be > 0");
  if (freqs_hz.empty()) throw ParameterError("frequency list is empty");
  for (double f : freqs_hz) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw ParameterError("frequencies must be finite and nonnegative");
    }
  }
  const std::size_t mics = geometry.mic_count();
  Tensor3<cdouble> values(grid.size(), freqs_hz.size(), mics);
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double az = angles::deg2rad(grid[l]);
    const double ux = std::cos(az);
    const double uy = std::sin(az);
    for (std::size_t m = 0; m < mics; ++m) {
      const auto& r = geometry.positions()[m];
      const double path = r[0] * ux + r[1] * uy;
      for (std::size_t f = 0; f < freqs_hz.size(); ++f) {
        const double phase =
            -2.0 * angles::kPi * freqs_hz[f] * path / speed_of_sound;
        values(l, f, m) = std::polar(1.0, phase);
      }
    }
  }
  return SteeringVectorSet(std::move(values),
                           std::vector<double>(freqs_hz.begin(), freqs_hz.end()),
                           grid, geometry.label());
}

namespace {
constexpr const char* kSteeringMagic = "LSDD-STEERING";
}

void save_steering_set(const SteeringVectorSet& set,
                       const std::filesystem::path& path) {
  auto out = container::open_output(path);
  out << kSteeringMagic << " 1\n"
      << "mics " << set.mic_count() << '\n'
      << "directions " << set.directions() << '\n'
      << "freqs " << set.freq_count() << '\n'
      << "label " << set.geometry_label() << '\n'
      << "grid " << container::join_numbers(set.grid().azimuths()) << '\n'
      << "freq_hz " << container::join_numbers(set.freqs_hz()) << '\n'
      << "payload complex64-le\n"
      << "end\n";
  for (const auto& z : set.values().data()) {
    container::write_f32(out, static_cast<float>(z.real()));
    container::write_f32(out, static_cast<float>(z.imag()));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

SteeringVectorSet load_steering_set(const std::filesystem::path& path) {
  auto in = container::open_input(path);
  const std::string version = container::expect_field(in, kSteeringMagic);
  if (version != "1") {
    throw FormatError("unsupported steering container version '" + version + "'");
  }
  const auto mics = container::parse_count(container::expect_field(in, "mics"), "mics");
  const auto dirs =
      container::parse_count(container::expect_field(in, "directions"), "directions");
  const auto nfreq = container::parse_count(container::expect_field(in, "freqs"), "freqs");
  std::string label = container::expect_field(in, "label");
  auto grid = container::parse_numbers(container::expect_field(in, "grid"), "grid");
  auto freqs = container::parse_numbers(container::expect_field(in, "freq_hz"), "freq_hz");
  const std::string payload = container::expect_field(in, "payload");
  if (payload != "complex64-le") {
    throw FormatError("unsupported payload encoding '" + payload + "'");
  }
  container::expect_field(in, "end");
  if (mics == 0) throw FormatError("malformed header: mics must be >= 1");
  if (grid.size() != dirs) {
    throw FormatError("dimension mismatch: grid lists " + std::to_string(grid.size()) +
                      " directions, header says " + std::to_string(dirs));
  }
  if (freqs.size() != nfreq) {
    throw FormatError("dimension mismatch: freq_hz lists " +
                      std::to_string(freqs.size()) + " values, header says " +
                      std::to_string(nfreq));
  }
  const auto raw = container::read_f32_payload(in, 2 * dirs * nfreq * mics, "steering");
  Tensor3<cdouble> values(dirs, nfreq, mics);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values.data()[i] = cdouble(raw[2 * i], raw[2 * i + 1]);
  }
  DirectionGrid dg = [&] {
    try {
      return DirectionGrid(std::move(grid));
    } catch (const ParameterError& e) {
      throw FormatError(std::string("malformed grid: ") + e.what());
    }
  }();
  return SteeringVectorSet(std::move(values), std::move(freqs), std::move(dg),
                           std::move(label));
}

}  // namespace lsdd
