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

// Independent reference implementations used by the unit and acceptance
// tests. Deliberately naive: no shared code with the library.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline double wrap(double deg) {
  while (deg > 180.0) deg -= 360.0;
  while (deg <= -180.0) deg += 360.0;
  return deg;
}

inline double angle_gap(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

// |<a, b>| / (|a| |b|)
inline double cosine(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx dot = 0.0;
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += std::conj(a[i]) * b[i];
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  return std::abs(dot) / std::sqrt(na * nb);
}

// ---- subtractive clustering, exhaustive over integer-degree centers ----

struct Estimate {
  double theta = 0.0;
  double w = 0.0;
};

struct Cluster {
  int center = 0;
  double weight = 0.0;
  bool defined = false;
  double theta = 0.0;
  std::size_t members = 0;
  double q = 0.0;
};

inline int degree_bin(double theta) {
  auto i = static_cast<long long>(std::floor(theta + 0.5));
  while (i > 180) i -= 360;
  while (i <= -180) i += 360;
  return static_cast<int>(i);
}

inline int ring_gap(int a, int b) {
  const int d = std::abs(a - b) % 360;
  return d > 180 ? 360 - d : d;
}

inline std::vector<Cluster> alg1(const std::vector<Estimate>& est, std::size_t speakers,
                                 int delta, double cap) {
  std::map<int, double> hist;
  for (int d = -179; d <= 180; ++d) hist[d] = 0.0;
  for (const auto& e : est) hist[degree_bin(e.theta)] += e.w;

  std::set<int> claimed;
  std::vector<Cluster> out;
  for (std::size_t pass = 0; pass <= speakers; ++pass) {
    Cluster c;
    double best = -1.0;
    int best_center = 0;
    for (int center = -179; center <= 180; ++center) {
      double sum = 0.0;
      for (int d = -179; d <= 180; ++d) {
        if (ring_gap(center, d) <= delta) sum += hist[d];
      }
      if (sum > best || (sum == best && hist[center] > hist[best_center])) {
        best = sum;
        best_center = center;
      }
    }
    if (best > 0.0) {
      c.center = best_center;
      c.weight = best;
      c.defined = true;
      std::set<int> window;
      for (int d = -179; d <= 180; ++d) {
        if (ring_gap(best_center, d) <= delta) {
          hist[d] = 0.0;
          if (!claimed.count(d)) window.insert(d);
        }
      }
      double acc = 0.0, wsum = 0.0;
      for (const auto& e : est) {
        if (!window.count(degree_bin(e.theta))) continue;
        ++c.members;
        double pick = e.theta;
        for (double cand : {e.theta - 360.0, e.theta + 360.0}) {
          if (std::fabs(cand - best_center) < std::fabs(pick - best_center)) pick = cand;
        }
        acc += e.w * pick;
        wsum += e.w;
      }
      if (wsum > 0.0) {
        c.theta = wrap(acc / wsum);
      } else {
        c.defined = false;
      }
      claimed.insert(window.begin(), window.end());
    }
    out.push_back(c);
  }
  const double ref = out.back().weight;
  for (std::size_t k = 0; k < speakers; ++k) {
    out[k].q = ref > 0.0 ? out[k].weight / ref : (out[k].weight > 0.0 ? cap : 0.0);
  }
  return out;
}

// ---- universal directivity map, straight from the definitions ----

inline double average_rank(const std::vector<double>& xs, std::size_t i) {
  double less = 0.0, equal = 0.0;
  for (double x : xs) {
    if (x < xs[i]) less += 1.0;
    if (x == xs[i]) equal += 1.0;
  }
  return less + (equal + 1.0) / 2.0;
}

inline void minmax_normalize(std::vector<double>& r) {
  double lo = r[0], hi = r[0];
  for (double v : r) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (auto& v : r) v = hi > lo ? (v - lo) / (hi - lo) : 1.0;
}

// steering[l][f][m]; returns xi[h][f].
inline std::vector<std::vector<double>> udm(
    const std::vector<std::vector<std::vector<cplx>>>& steering,
    const std::vector<double>& azimuths, double thr, double near_deg, double far_deg,
    bool global) {
  const std::size_t L = steering.size();
  const std::size_t F = steering[0].size();
  std::vector<std::vector<double>> m(L, std::vector<double>(F, 0.0));
  auto M = m;
  for (std::size_t h = 0; h < L; ++h) {
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t l = 0; l < L; ++l) {
        const double lam = h == l ? 1.0 : cosine(steering[h][f], steering[l][f]);
        if (!(lam > thr)) continue;
        const double gap = angle_gap(azimuths[l], azimuths[h]);
        if (gap < near_deg) m[h][f] += 1.0;
        if (gap > far_deg) M[h][f] += 1.0;
      }
    }
  }
  std::vector<std::vector<double>> xi(L, std::vector<double>(F));
  if (global) {
    std::vector<double> mv, nM;
    for (std::size_t h = 0; h < L; ++h) {
      for (std::size_t f = 0; f < F; ++f) {
        mv.push_back(m[h][f]);
        nM.push_back(-M[h][f]);
      }
    }
    std::vector<double> r(mv.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = average_rank(mv, i) + average_rank(nM, i);
    minmax_normalize(r);
    for (std::size_t h = 0; h < L; ++h) {
      for (std::size_t f = 0; f < F; ++f) xi[h][f] = r[h * F + f];
    }
  } else {
    for (std::size_t h = 0; h < L; ++h) {
      std::vector<double> mv(F), nM(F), r(F);
      for (std::size_t f = 0; f < F; ++f) {
        mv[f] = m[h][f];
        nM[f] = -M[h][f];
      }
      for (std::size_t f = 0; f < F; ++f) r[f] = average_rank(mv, f) + average_rank(nM, f);
      minmax_normalize(r);
      xi[h] = r;
    }
  }
  return xi;
}

}  // namespace oracle
