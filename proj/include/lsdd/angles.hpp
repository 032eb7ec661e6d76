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

#include <cmath>

// Azimuth helpers. All angles in degrees, canonical range (-180, 180].
namespace lsdd::angles {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

inline double wrap180(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

// Absolute circular difference in [0, 180].
inline double circular_distance(double a_deg, double b_deg) {
  return std::fabs(wrap180(a_deg - b_deg));
}

// Representative of `deg` closest to `reference` (may leave (-180, 180]).
inline double unwrap_near(double deg, double reference) {
  deg -= 360.0 * std::round((deg - reference) / 360.0);
  if (deg - reference > 180.0) deg -= 360.0;
  if (deg - reference <= -180.0) deg += 360.0;
  return deg;
}

}  // namespace lsdd::angles
