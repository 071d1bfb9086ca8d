// Copyright 2026 The lflh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lflh/geometry.hpp"

#include <algorithm>
#include <limits>

#include "lflh/common.hpp"

namespace lflh {

double wrap_angle(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

Vec2 world_to_frame(const Pose2& ref, const Vec2& p) {
  const double c = std::cos(ref.phi), s = std::sin(ref.phi);
  const double dx = p.x - ref.x, dy = p.y - ref.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 frame_to_world(const Pose2& ref, const Vec2& p) {
  const double c = std::cos(ref.phi), s = std::sin(ref.phi);
  return {ref.x + c * p.x - s * p.y, ref.y + s * p.x + c * p.y};
}

Pose2 pose_in_frame(const Pose2& ref, const Pose2& p) {
  const Vec2 pos = world_to_frame(ref, {p.x, p.y});
  return {pos.x, pos.y, wrap_angle(p.phi - ref.phi)};
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

double point_polyline_distance(const Vec2& p, const std::vector<Vec2>& pts) {
  LFLH_REQUIRE(!pts.empty(), "polyline distance: empty polyline");
  if (pts.size() == 1) return (p - pts[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    best = std::min(best, point_segment_distance(p, pts[i], pts[i + 1]));
  return best;
}

double polyline_length(const std::vector<Vec2>& pts) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    len += (pts[i + 1] - pts[i]).norm();
  return len;
}

}  // namespace lflh
