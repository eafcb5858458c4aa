// Copyright 2026 The coopdrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COOPDRIVE__GEOMETRY_HPP_
#define COOPDRIVE__GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <numbers>

namespace coopdrive
{

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2 &) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double dot(const Vec2 & o) const { return x * o.x + y * o.y; }
  constexpr double cross(const Vec2 & o) const { return x * o.y - y * o.x; }
};

inline double distance(const Vec2 & a, const Vec2 & b) { return (a - b).norm(); }

inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Rectangle with a center, a heading and full length/width.
struct OrientedBox
{
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;

  std::array<Vec2, 4> corners() const;
};

/// Separating-axis test. Boxes that only touch along an edge do not overlap.
bool boxes_overlap(const OrientedBox & a, const OrientedBox & b);

/// Distance from point p to segment [a, b] and the clamped segment parameter.
struct SegmentProjection
{
  double distance = 0.0;
  double t = 0.0;
};
SegmentProjection project_onto_segment(const Vec2 & p, const Vec2 & a, const Vec2 & b);

}  // namespace coopdrive

#endif  // COOPDRIVE__GEOMETRY_HPP_
