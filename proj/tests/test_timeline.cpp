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

#include "lsdd/error.hpp"
#include "lsdd/timeline.hpp"

using namespace lsdd;

namespace {

GroundTruth one_speaker(std::vector<Span> activity, double duration, Trajectory az = Trajectory::constant(0.0)) {
  GroundTruth g;
  g.duration_s = duration;
  g.speakers.push_back({"a", std::move(az), merge_spans(std::move(activity))});
  return g;
}

}  // namespace

TEST_CASE("trajectory sampling") {
  const auto c = Trajectory::constant(42.0);
  CHECK(c.sample(0.0) == 42.0);
  CHECK(c.sample(123.4) == 42.0);

  const Trajectory lin({{0.0, 0.0}, {1.0, 90.0}});
  CHECK(lin.sample(0.5) == 45.0);
  CHECK(lin.sample(1.0) == 90.0);
  CHECK_THROWS_AS(lin.sample(1.5), ParameterError);

  const Trajectory seam({{0.0, 170.0}, {1.0, -170.0}});
  CHECK(seam.sample(0.5) == 180.0);
  CHECK(seam.sample(0.25) == 175.0);
  CHECK(seam.sample(0.75) == -175.0);

  const Trajectory pose({{0.0, 10.0}, {1.0, 20.0}});
  CHECK(pose.sample(0.5) == 15.0);

  CHECK_THROWS_AS(Trajectory({{1.0, 0.0}, {1.0, 5.0}}), ParameterError);
  CHECK_THROWS_AS(Trajectory({{2.0, 0.0}, {1.0, 5.0}}), ParameterError);
}

TEST_CASE("excursion within a window") {
  const Trajectory t({{0.0, 0.0}, {1.0, 30.0}, {2.0, 0.0}});
  CHECK(t.excursion(0.0, 1.0) == doctest::Approx(30.0));
  CHECK(t.excursion(0.5, 1.5) == doctest::Approx(15.0));
  CHECK(t.excursion(0.0, 2.0) == doctest::Approx(30.0));
  const Trajectory seam({{0.0, 170.0}, {1.0, -170.0}});
  CHECK(seam.excursion(0.0, 1.0) == doctest::Approx(20.0));
}

TEST_CASE("span merging") {
  const auto m = merge_spans({{0.0, 1.0}, {0.5, 2.0}, {3.0, 4.0}, {4.0, 5.0}});
  REQUIRE(m.size() == 2);
  CHECK(m[0] == Span{0.0, 2.0});
  CHECK(m[1] == Span{3.0, 5.0});
  CHECK(spans_cover(m, 0.2, 1.9));
  CHECK_FALSE(spans_cover(m, 1.5, 3.5));
  CHECK_THROWS_AS(merge_spans({{2.0, 1.0}}), ParameterError);
}

TEST_CASE("interval segmentation") {
  const auto full = segment_intervals(one_speaker({{0.0, 10.0}}, 10.0), 0.5);
  REQUIRE(full.size() == 20);
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full[i].active);
    CHECK(full[i].speakers == 1);
    CHECK(full[i].mid_s == doctest::Approx(0.25 + 0.5 * static_cast<double>(i)));
  }

  const auto partial = segment_intervals(one_speaker({{0.0, 0.4}}, 0.5), 0.5);
  REQUIRE(partial.size() == 1);
  CHECK_FALSE(partial[0].active);
  CHECK(partial[0].speakers == 0);

  GroundTruth two = one_speaker({{0.0, 1.0}}, 1.0);
  two.speakers.push_back({"b", Trajectory::constant(90.0), {{0.5, 1.0}}});
  const auto iv = segment_intervals(two, 0.5);
  REQUIRE(iv.size() == 2);
  CHECK(iv[0].speakers == 1);
  CHECK(iv[1].speakers == 2);
  CHECK(iv[1].speaker_ids == std::vector<std::string>{"a", "b"});

  GroundTruth empty;
  empty.duration_s = 2.0;
  for (const auto& r : segment_intervals(empty, 0.5)) CHECK_FALSE(r.active);

  GroundTruth yawed = one_speaker({{0.0, 1.0}}, 1.0);
  yawed.array_yaw = Trajectory({{0.0, 0.0}, {1.0, 40.0}});
  const auto y = segment_intervals(yawed, 0.5);
  CHECK(y[0].delta_array_deg == doctest::Approx(10.0));
  CHECK(y[1].delta_array_deg == doctest::Approx(30.0));

  CHECK_THROWS_AS(segment_intervals(yawed, 0.0), ParameterError);
}

TEST_CASE("room frame conversion") {
  CHECK(to_room_frame(30.0, 0.0) == 30.0);
  CHECK(to_room_frame(170.0, 20.0) == -170.0);
  CHECK(to_room_frame(-45.0, 45.0) == 0.0);
  CHECK(to_room_frame(-170.0, -10.0) == 180.0);
}

TEST_CASE("dynamic interval table") {
  const std::vector<Trajectory> still{Trajectory::constant(10.0)};
  const auto s = classify_dynamic(still, 10.0, {100, 500, 1000}, {3, 5, 7});
  for (const auto& row : s.percent) {
    for (double v : row) CHECK(v == 0.0);
  }

  // 6 deg/s: a 500 ms interval moves exactly 3 degrees.
  const std::vector<Trajectory> moving{Trajectory({{0.0, -30.0}, {10.0, 30.0}})};
  const auto m = classify_dynamic(moving, 10.0, {500.0}, {2.9, 3.0});
  CHECK(m.percent[0][0] == 100.0);
  CHECK(m.percent[0][1] == 0.0);

  // 90 degrees in 1 s.
  const std::vector<Trajectory> fast{Trajectory({{0.0, 0.0}, {1.0, 90.0}})};
  CHECK(classify_dynamic(fast, 1.0, {500.0}, {5.0}).percent[0][0] == 100.0);

  // Moves only during the second of four intervals.
  const std::vector<Trajectory> burst{Trajectory({{0.0, 0.0}, {0.5, 0.0}, {1.0, 20.0}, {2.0, 20.0}})};
  CHECK(classify_dynamic(burst, 2.0, {500.0}, {5.0}).percent[0][0] == 25.0);

  CHECK_THROWS_AS(classify_dynamic(moving, 10.0, {500.0}, {0.0}), ParameterError);
}
