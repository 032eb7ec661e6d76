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

#include <array>
#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lsdd/tensor.hpp"

namespace lsdd {

using cdouble = std::complex<double>;

inline constexpr double kDefaultSpeedOfSound = 343.0;

using Position = std::array<double, 3>;

// Microphone positions in the array frame, meters. Azimuth 0 is the +x axis
// and azimuth grows counter-clockwise towards +y.
class ArrayGeometry {
 public:
  ArrayGeometry(std::vector<Position> mic_positions, std::string label);

  // M microphones evenly spaced on a horizontal circle, first one on +x.
  static ArrayGeometry ring(std::size_t mics, double radius_m,
                            std::string label = "");
  // M microphones along the x axis, centered on the origin.
  static ArrayGeometry linear(std::size_t mics, double spacing_m,
                              std::string label = "");

  std::size_t mic_count() const { return positions_.size(); }
  const std::vector<Position>& positions() const { return positions_; }
  const std::string& label() const { return label_; }

  ArrayGeometry translated(const Position& offset) const;

 private:
  std::vector<Position> positions_;
  std::string label_;
};

class DirectionGrid {
 public:
  explicit DirectionGrid(std::vector<double> azimuths_deg);

  std::size_t size() const { return azimuths_.size(); }
  double operator[](std::size_t l) const { return azimuths_[l]; }
  const std::vector<double>& azimuths() const { return azimuths_; }
  // Median spacing of consecutive directions (circularly).
  double resolution_deg() const { return resolution_; }

  // Index of the grid direction closest (circularly) to `azimuth_deg`;
  // ties go to the lower index.
  std::size_t nearest(double azimuth_deg) const;

  bool operator==(const DirectionGrid& o) const {
    return azimuths_ == o.azimuths_;
  }

 private:
  std::vector<double> azimuths_;
  double resolution_ = 0.0;
};

// Uniform grid over (-180, 180]: L = round(360 / resolution) directions
// ending at 180.
DirectionGrid build_direction_grid(double resolution_deg);

// Array response v(direction, frequency, mic). Immutable once built.
class SteeringVectorSet {
 public:
  SteeringVectorSet(Tensor3<cdouble> values, std::vector<double> freqs_hz,
                    DirectionGrid grid, std::string geometry_label);

  std::size_t directions() const { return values_.dim(0); }
  std::size_t freq_count() const { return values_.dim(1); }
  std::size_t mic_count() const { return values_.dim(2); }

  std::span<const cdouble> vector(std::size_t l, std::size_t f) const {
    return values_.row(l, f);
  }
  const Tensor3<cdouble>& values() const { return values_; }
  const std::vector<double>& freqs_hz() const { return freqs_; }
  const DirectionGrid& grid() const { return grid_; }
  const std::string& geometry_label() const { return label_; }

  // Index of the frequency closest to `hz`, or throws ParameterError when
  // the nearest one is further than `tolerance_hz` away.
  std::size_t freq_index(double hz, double tolerance_hz) const;

 private:
  Tensor3<cdouble> values_;
  std::vector<double> freqs_;
  DirectionGrid grid_;
  std::string label_;
};

// Far-field plane-wave model. With u(phi) = (cos phi, sin phi, 0) pointing
// from the array towards the source,
//   v_m(phi, f) = exp(-j * 2 pi f * (r_m . u(phi)) / c).
// The scene simulator uses the same function, so synthesis and estimation
// share one sign convention.
SteeringVectorSet free_field_steering(const ArrayGeometry& geometry,
                                      const DirectionGrid& grid,
                                      std::span<const double> freqs_hz,
                                      double speed_of_sound = kDefaultSpeedOfSound);

// Steering container, version 1. ASCII header, one field per line:
//
//   LSDD-STEERING 1
//   mics <M>
//   directions <L>
//   freqs <F>
//   label <rest of line>
//   grid <L azimuths, degrees>
//   freq_hz <F frequencies>
//   payload complex64-le
//   end
//
// followed by exactly L*F*M little-endian (float32 re, float32 im) pairs
// in [l][f][m] order. Header numbers use the shortest round-trip decimal form.
void save_steering_set(const SteeringVectorSet& set,
                       const std::filesystem::path& path);
SteeringVectorSet load_steering_set(const std::filesystem::path& path);

}  // namespace lsdd
