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

#include "lsdd/udm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "container.hpp"
#include "lsdd/angles.hpp"
#include "lsdd/error.hpp"
#include "lsdd/lsdd_core.hpp"

namespace lsdd {

DirectivityTensor compute_directivity(const SteeringVectorSet& steering) {
  const std::size_t dirs = steering.directions();
  const std::size_t freqs = steering.freq_count();
  DirectivityTensor out{Tensor3<double>(dirs, dirs, freqs), steering.grid(),
                        steering.freqs_hz()};
  for (std::size_t f = 0; f < freqs; ++f) {
    for (std::size_t h = 0; h < dirs; ++h) {
      out.lambda(h, h, f) = 1.0;
      for (std::size_t l = h + 1; l < dirs; ++l) {
        const double d =
            cosine_similarity(steering.vector(h, f), steering.vector(l, f));
        out.lambda(h, l, f) = d;
        out.lambda(l, h, f) = d;
      }
    }
  }
  return out;
}

Tensor3<std::uint8_t> binarize_directivity(const DirectivityTensor& directivity,
                                           double thr) {
  if (!(thr > 0.0 && thr < 1.0)) throw ParameterError("thr must lie in (0, 1)");
  const auto& lam = directivity.lambda;
  Tensor3<std::uint8_t> out(lam.dim(0), lam.dim(1), lam.dim(2));
  for (std::size_t i = 0; i < lam.size(); ++i) {
    out.data()[i] = lam.data()[i] > thr ? 1 : 0;
  }
  return out;
}

NearFarCounts count_near_far(const Tensor3<std::uint8_t>& binary,
                             const DirectionGrid& grid, double delta_near_deg,
                             double delta_far_deg) {
  if (!(delta_near_deg > 0.0) || !(delta_near_deg < delta_far_deg)) {
    throw ParameterError("need 0 < delta_near < delta_far");
  }
  const std::size_t dirs = binary.dim(0);
  const std::size_t freqs = binary.dim(2);
  if (dirs != grid.size() || binary.dim(1) != grid.size()) {
    throw ParameterError("binary directivity does not match the grid");
  }
  NearFarCounts out{Matrix<double>(dirs, freqs), Matrix<double>(dirs, freqs)};
  for (std::size_t h = 0; h < dirs; ++h) {
    for (std::size_t l = 0; l < dirs; ++l) {
      const double dist = angles::circular_distance(grid[l], grid[h]);
      const bool is_near = dist < delta_near_deg;
      const bool is_far = dist > delta_far_deg;
      if (!is_near && !is_far) continue;
      for (std::size_t f = 0; f < freqs; ++f) {
        if (!binary(h, l, f)) continue;
        if (is_near) out.near(h, f) += 1.0;
        if (is_far) out.far(h, f) += 1.0;
      }
    }
  }
  return out;
}

RankScope parse_rank_scope(std::string_view name) {
  if (name == "global") return RankScope::kGlobal;
  if (name == "per-direction" || name == "per_direction") return RankScope::kPerDirection;
  throw ParameterError("unknown rank scope '" + std::string(name) + "'");
}

std::string_view to_string(RankScope scope) {
  return scope == RankScope::kGlobal ? "global" : "per-direction";
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) hold equal values: ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

void normalize_in_place(std::vector<double>& total) {
  if (total.empty()) return;
  const auto [lo, hi] = std::minmax_element(total.begin(), total.end());
  const double mn = *lo;
  const double mx = *hi;
  for (auto& v : total) v = mx > mn ? (v - mn) / (mx - mn) : 1.0;
}

std::vector<double> rank_sum(const std::vector<double>& near,
                             const std::vector<double>& far) {
  std::vector<double> neg_far(far.size());
  std::transform(far.begin(), far.end(), neg_far.begin(), [](double v) { return -v; });
  auto total = average_ranks(near);
  const auto far_rank = average_ranks(neg_far);
  for (std::size_t i = 0; i < total.size(); ++i) total[i] += far_rank[i];
  return total;
}

}  // namespace

Matrix<double> rank_and_normalize(const NearFarCounts& counts, RankScope scope) {
  const std::size_t dirs = counts.near.rows();
  const std::size_t freqs = counts.near.cols();
  if (counts.far.rows() != dirs || counts.far.cols() != freqs) {
    throw ParameterError("near/far count shapes differ");
  }
  Matrix<double> out(dirs, freqs);
  if (scope == RankScope::kGlobal) {
    auto total = rank_sum(counts.near.data(), counts.far.data());
    normalize_in_place(total);
    out.data() = std::move(total);
    return out;
  }
  for (std::size_t h = 0; h < dirs; ++h) {
    std::vector<double> near(freqs), far(freqs);
    for (std::size_t f = 0; f < freqs; ++f) {
      near[f] = counts.near(h, f);
      far[f] = counts.far(h, f);
    }
    auto total = rank_sum(near, far);
    normalize_in_place(total);
    for (std::size_t f = 0; f < freqs; ++f) out(h, f) = total[f];
  }
  return out;
}

void UdmParams::validate() const {
  if (!(thr > 0.0 && thr < 1.0)) throw ParameterError("thr must lie in (0, 1)");
  if (!(delta_near_deg > 0.0) || !(delta_near_deg < delta_far_deg)) {
    throw ParameterError("need 0 < delta_near < delta_far");
  }
}

std::size_t Udm::freq_index(double hz, double tolerance_hz) const {
  if (freqs_hz.empty()) throw ParameterError("UDM has no frequencies");
  std::size_t best = 0;
  for (std::size_t f = 1; f < freqs_hz.size(); ++f) {
    if (std::fabs(freqs_hz[f] - hz) < std::fabs(freqs_hz[best] - hz)) best = f;
  }
  if (std::fabs(freqs_hz[best] - hz) > tolerance_hz) {
    throw ParameterError("frequency " + container::format_number(hz) +
                         " Hz lies outside the UDM band");
  }
  return best;
}

Udm build_udm(const SteeringVectorSet& steering, const UdmParams& params,
              double f_low_hz, double f_high_hz) {
  params.validate();
  std::vector<std::size_t> selected;
  for (std::size_t f = 0; f < steering.freq_count(); ++f) {
    const double hz = steering.freqs_hz()[f];
    if (hz >= f_low_hz && hz <= f_high_hz) selected.push_back(f);
  }
  if (selected.empty()) throw BandError("no steering frequencies inside the band");

  const std::size_t dirs = steering.directions();
  const std::size_t mics = steering.mic_count();
  NearFarCounts counts{Matrix<double>(dirs, selected.size()),
                       Matrix<double>(dirs, selected.size())};
  std::vector<double> band_freqs;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const std::size_t f = selected[i];
    band_freqs.push_back(steering.freqs_hz()[f]);
    Tensor3<cdouble> slice(dirs, 1, mics);
    for (std::size_t l = 0; l < dirs; ++l) {
      const auto v = steering.vector(l, f);
      std::copy(v.begin(), v.end(), slice.row(l, 0).begin());
    }
    const SteeringVectorSet one(std::move(slice), {band_freqs.back()},
                                steering.grid(), steering.geometry_label());
    const auto binary = binarize_directivity(compute_directivity(one), params.thr);
    const auto c = count_near_far(binary, steering.grid(), params.delta_near_deg,
                                  params.delta_far_deg);
    for (std::size_t h = 0; h < dirs; ++h) {
      counts.near(h, i) = c.near(h, 0);
      counts.far(h, i) = c.far(h, 0);
    }
  }
  return Udm{rank_and_normalize(counts, params.scope), params, steering.grid(),
             std::move(band_freqs)};
}

double reliability_weight(const Udm& udm, double phi_hat_deg, std::size_t freq,
                          double xi) {
  if (freq >= udm.freqs_hz.size()) {
    throw ParameterError("frequency index " + std::to_string(freq) +
                         " outside the UDM band");
  }
  return udm.alpha(udm.grid.nearest(phi_hat_deg), freq) * xi;
}

namespace {
constexpr const char* kUdmMagic = "LSDD-UDM";
}

void save_udm(const Udm& udm, const std::filesystem::path& path) {
  auto out = container::open_output(path);
  out << kUdmMagic << " 1\n"
      << "thr " << container::format_number(udm.params.thr) << '\n'
      << "delta_near_deg " << container::format_number(udm.params.delta_near_deg) << '\n'
      << "delta_far_deg " << container::format_number(udm.params.delta_far_deg) << '\n'
      << "rank_scope " << to_string(udm.params.scope) << '\n'
      << "directions " << udm.grid.size() << '\n'
      << "freqs " << udm.freqs_hz.size() << '\n'
      << "grid " << container::join_numbers(udm.grid.azimuths()) << '\n'
      << "freq_hz " << container::join_numbers(udm.freqs_hz) << '\n'
      << "payload float32-le\n"
      << "end\n";
  for (double v : udm.xi_map.data()) container::write_f32(out, static_cast<float>(v));
  if (!out) throw IoError("write failed: " + path.string());
}

Udm load_udm(const std::filesystem::path& path) {
  auto in = container::open_input(path);
  const std::string version = container::expect_field(in, kUdmMagic);
  if (version != "1") throw FormatError("unsupported UDM version '" + version + "'");
  auto number = [&](const char* key) {
    const auto v = container::parse_numbers(container::expect_field(in, key), key);
    if (v.size() != 1) throw FormatError(std::string("malformed header: ") + key);
    return v[0];
  };
  UdmParams params;
  params.thr = number("thr");
  params.delta_near_deg = number("delta_near_deg");
  params.delta_far_deg = number("delta_far_deg");
  try {
    params.scope = parse_rank_scope(container::expect_field(in, "rank_scope"));
    params.validate();
  } catch (const ParameterError& e) {
    throw FormatError(std::string("malformed header: ") + e.what());
  }
  const auto dirs = container::parse_count(container::expect_field(in, "directions"), "directions");
  const auto nfreq = container::parse_count(container::expect_field(in, "freqs"), "freqs");
  auto grid = container::parse_numbers(container::expect_field(in, "grid"), "grid");
  auto freqs = container::parse_numbers(container::expect_field(in, "freq_hz"), "freq_hz");
  if (container::expect_field(in, "payload") != "float32-le") {
    throw FormatError("unsupported UDM payload encoding");
  }
  container::expect_field(in, "end");
  if (grid.size() != dirs || freqs.size() != nfreq) {
    throw FormatError("dimension mismatch between UDM header counts and lists");
  }
  const auto raw = container::read_f32_payload(in, dirs * nfreq, "UDM");
  Matrix<double> xi(dirs, nfreq);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] >= 0.0f && raw[i] <= 1.0f)) {
      throw FormatError("UDM value at index " + std::to_string(i) + " outside [0, 1]");
    }
    xi.data()[i] = raw[i];
  }
  DirectionGrid dg = [&] {
    try {
      return DirectionGrid(std::move(grid));
    } catch (const ParameterError& e) {
      throw FormatError(std::string("malformed grid: ") + e.what());
    }
  }();
  return Udm{std::move(xi), params, std::move(dg), std::move(freqs)};
}

}  // namespace lsdd
