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

#ifndef LFLH_GEOMETRY_HPP_
#define LFLH_GEOMETRY_HPP_

#include <cmath>
#include <vector>

namespace lflh {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

/// Planar pose; heading normalized to (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;

  Vec2 position() const { return {x, y}; }
};

/// Commanded or measured velocity of a differential-drive base.
struct Twist {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

/// Express a world-frame point in the frame of `ref`.
Vec2 world_to_frame(const Pose2& ref, const Vec2& p);
/// Express a frame-local point back in the world frame.
Vec2 frame_to_world(const Pose2& ref, const Vec2& p);
/// Express a world-frame pose in the frame of `ref`.
Pose2 pose_in_frame(const Pose2& ref, const Pose2& p);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Minimum distance from `p` to the polyline through `pts` (>= 2 points; a
/// single point degenerates to point distance).
double point_polyline_distance(const Vec2& p, const std::vector<Vec2>& pts);

/// Arc length of a polyline.
double polyline_length(const std::vector<Vec2>& pts);

}  // namespace lflh

#endif  // LFLH_GEOMETRY_HPP_
