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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "lsdd/array_model.hpp"
#include "lsdd/error.hpp"
#include "lsdd/udm.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace lsdd;

namespace {

Tensor3<std::uint8_t> all_ones(std::size_t dirs, std::size_t freqs) {
  Tensor3<std::uint8_t> b(dirs, dirs, freqs);
  for (auto& v : b.data()) v = 1;
  return b;
}

NearFarCounts counts_from(const std::vector<std::pair<double, double>>& mm) {
  NearFarCounts c{Matrix<double>(mm.size(), 1), Matrix<double>(mm.size(), 1)};
  for (std::size_t i = 0; i < mm.size(); ++i) {
    c.near(i, 0) = mm[i].first;
    c.far(i, 0) = mm[i].second;
  }
  return c;
}

}  // namespace

TEST_CASE("directivity: unit diagonal and M = 1 gives all ones") {
  const auto grid = build_direction_grid(15.0);
  const std::vector<double> freqs{500.0, 2000.0};
  const auto ring = compute_directivity(free_field_steering(ArrayGeometry::ring(6, 0.05), grid, freqs));
  for (std::size_t h = 0; h < grid.size(); ++h) {
    for (std::size_t f = 0; f < freqs.size(); ++f) CHECK(ring.lambda(h, h, f) == 1.0);
  }
  const auto one = compute_directivity(free_field_steering(ArrayGeometry({{0, 0, 0}}, "m1"), grid, freqs));
  for (double v : one.lambda.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  const auto b = binarize_directivity(one, 0.99);
  for (auto v : b.data()) CHECK(v == 1);
}

TEST_CASE("directivity main lobe at 2 kHz sits around the look direction") {
  const auto grid = build_direction_grid(1.0);
  const std::vector<double> freqs{2000.0};
  const auto set = free_field_steering(ArrayGeometry::ring(6, 0.05), grid, freqs);
  const auto d = compute_directivity(set);
  const std::size_t h = grid.nearest(0.0);
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double ref = oracle::cosine(
        std::vector<oracle::cplx>(set.vector(h, 0).begin(), set.vector(h, 0).end()),
        std::vector<oracle::cplx>(set.vector(l, 0).begin(), set.vector(l, 0).end()));
    CHECK(d.lambda(h, l, 0) == doctest::Approx(l == h ? 1.0 : ref).epsilon(1e-12));
  }
  // Similarity falls off monotonically over the first 30 degrees on each side.
  for (int k = 1; k <= 30; ++k) {
    CHECK(d.lambda(h, h + k, 0) < d.lambda(h, h + k - 1, 0));
    CHECK(d.lambda(h, h - k, 0) < d.lambda(h, h - k + 1, 0));
  }
  CHECK(d.lambda(h, grid.nearest(180.0), 0) < 0.85);
}

TEST_CASE("binarization is a strict comparison") {
  DirectivityTensor d{Tensor3<double>(1, 3, 1), DirectionGrid({0.0}), {1000.0}};
  d.lambda(0, 0, 0) = 1.0;
  d.lambda(0, 1, 0) = 0.9;
  d.lambda(0, 2, 0) = 0.3;
  auto b = binarize_directivity(d, 0.85);
  CHECK(b(0, 0, 0) == 1);
  CHECK(b(0, 1, 0) == 1);
  CHECK(b(0, 2, 0) == 0);
  d.lambda(0, 1, 0) = 0.85;
  CHECK(binarize_directivity(d, 0.85)(0, 1, 0) == 0);
  CHECK_THROWS_AS(binarize_directivity(d, 1.0), ParameterError);
  CHECK_THROWS_AS(binarize_directivity(d, 0.0), ParameterError);
}

TEST_CASE("near and far counts") {
  const auto grid = build_direction_grid(1.0);
  const auto ones = count_near_far(all_ones(360, 1), grid, 10.0, 25.0);
  for (std::size_t h = 0; h < 360; ++h) {
    CHECK(ones.near(h, 0) == 19.0);
    CHECK(ones.far(h, 0) == 360.0 - 51.0);
  }
  Tensor3<std::uint8_t> zeros(360, 360, 1);
  const auto none = count_near_far(zeros, grid, 10.0, 25.0);
  for (std::size_t h = 0; h < 360; ++h) {
    CHECK(none.near(h, 0) == 0.0);
    CHECK(none.far(h, 0) == 0.0);
  }
  Tensor3<std::uint8_t> diag(360, 360, 1);
  for (std::size_t h = 0; h < 360; ++h) diag(h, h, 0) = 1;
  const auto d = count_near_far(diag, grid, 10.0, 25.0);
  for (std::size_t h = 0; h < 360; ++h) {
    CHECK(d.near(h, 0) == 1.0);
    CHECK(d.far(h, 0) == 0.0);
  }
  CHECK_THROWS_AS(count_near_far(zeros, grid, 25.0, 10.0), ParameterError);
  CHECK_THROWS_AS(count_near_far(zeros, grid, 0.0, 10.0), ParameterError);
}

TEST_CASE("rank normalization examples") {
  const auto constant = rank_and_normalize(counts_from({{3, 4}, {3, 4}, {3, 4}}));
  for (double v : constant.data()) CHECK(v == 1.0);

  const auto two = rank_and_normalize(counts_from({{19, 0}, {1, 40}}));
  CHECK(two(0, 0) == 1.0);
  CHECK(two(1, 0) == 0.0);

  const auto a = rank_and_normalize(counts_from({{5, 1}, {5, 7}, {2, 3}}));
  const auto b = rank_and_normalize(counts_from({{5, 7}, {5, 1}, {2, 3}}));
  CHECK(a(0, 0) == b(1, 0));
  CHECK(a(1, 0) == b(0, 0));
  CHECK(a(2, 0) == b(2, 0));
  // Swapping two entries tied in both counts changes nothing.
  const auto c = rank_and_normalize(counts_from({{5, 1}, {5, 1}, {2, 3}}));
  CHECK(c(0, 0) == c(1, 0));

  CHECK(average_ranks({3.0, 1.0, 3.0, 2.0}) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("rank normalization monotonicity probe") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> cnt(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> mm(6);
    for (auto& p : mm) p = {cnt(rng), cnt(rng)};
    const auto base = rank_and_normalize(counts_from(mm));
    const std::size_t i = static_cast<std::size_t>(trial) % mm.size();
    auto up_near = mm;
    up_near[i].first += 1.0;
    CHECK(rank_and_normalize(counts_from(up_near))(i, 0) >= base(i, 0));
    auto up_far = mm;
    up_far[i].second += 1.0;
    CHECK(rank_and_normalize(counts_from(up_far))(i, 0) <= base(i, 0));
  }
}

TEST_CASE("UDM equals the naive oracle on toy steering sets") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto toy = gen::random_toy(rng);
    for (double thr : {0.5, 0.85}) {
      for (auto scope : {RankScope::kGlobal, RankScope::kPerDirection}) {
        UdmParams p;
        p.thr = thr;
        p.delta_near_deg = 40.0;
        p.delta_far_deg = 70.0;
        p.scope = scope;
        const auto udm = build_udm(toy.set, p, 0.0, 1e9);
        const auto ref = oracle::udm(toy.raw, toy.azimuths, thr, 40.0, 70.0,
                                     scope == RankScope::kGlobal);
        for (std::size_t h = 0; h < toy.azimuths.size(); ++h) {
          for (std::size_t f = 0; f < toy.set.freq_count(); ++f) {
            REQUIRE(udm.alpha(h, f) == ref[h][f]);
          }
        }
      }
    }
  }
}

TEST_CASE("UDM on the 6-mic ring spans [0, 1] and is scene independent") {
  const auto grid = build_direction_grid(1.0);
  std::vector<double> freqs;
  for (std::size_t f = 0; f <= 512; ++f) freqs.push_back(15.625 * static_cast<double>(f));
  const auto set = free_field_steering(ArrayGeometry::ring(6, 0.05), grid, freqs);
  const auto udm = build_udm(set, UdmParams{}, 1500.0, 3500.0);
  CHECK(udm.freqs_hz.size() == 129);
  const auto [lo, hi] = std::minmax_element(udm.xi_map.data().begin(), udm.xi_map.data().end());
  CHECK(*lo == 0.0);
  CHECK(*hi == 1.0);
  const auto again = build_udm(set, UdmParams{}, 1500.0, 3500.0);
  CHECK(again.xi_map == udm.xi_map);

  CHECK(reliability_weight(udm, 30.0, 0, 0.0) == 0.0);
  const std::size_t h = grid.nearest(30.0);
  CHECK(reliability_weight(udm, 30.2, 5, 0.8) == udm.alpha(h, 5) * 0.8);

  const auto path = std::filesystem::temp_directory_path() / "lsdd_test_udm.lsdd";
  save_udm(udm, path);
  const auto back = load_udm(path);
  CHECK(back.grid == udm.grid);
  CHECK(back.freqs_hz == udm.freqs_hz);
  CHECK(back.params.thr == udm.params.thr);
  for (std::size_t i = 0; i < udm.xi_map.data().size(); ++i) {
    REQUIRE(back.xi_map.data()[i] == static_cast<double>(static_cast<float>(udm.xi_map.data()[i])));
  }
  std::filesystem::remove(path);
}

TEST_CASE("reliability weight examples") {
  Udm udm{Matrix<double>(1, 1), UdmParams{}, DirectionGrid({0.0}), {1000.0}};
  udm.xi_map(0, 0) = 0.5;
  CHECK(reliability_weight(udm, 0.0, 0, 0.8) == 0.4);
  udm.xi_map(0, 0) = 1.0;
  CHECK(reliability_weight(udm, 10.0, 0, 0.73) == 0.73);
  CHECK_THROWS_AS(reliability_weight(udm, 0.0, 3, 0.5), ParameterError);
}

TEST_CASE("parameter validation") {
  UdmParams p;
  p.thr = 1.2;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = UdmParams{};
  p.delta_near_deg = 30.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK(parse_rank_scope("per-direction") == RankScope::kPerDirection);
  CHECK_THROWS_AS(parse_rank_scope("local"), ParameterError);
}
