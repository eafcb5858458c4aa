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

#include "coopdrive/geometry.hpp"

#include <algorithm>

namespace coopdrive
{

double normalize_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

std::array<Vec2, 4> OrientedBox::corners() const
{
  const Vec2 f = unit_from_heading(heading) * (0.5 * length);
  const Vec2 l = Vec2{-std::sin(heading), std::cos(heading)} * (0.5 * width);
  return {center + f + l, center + f - l, center - f - l, center - f + l};
}

namespace
{

// Half-extent of box b projected onto unit axis n.
double projected_radius(const OrientedBox & b, const Vec2 & n)
{
  const Vec2 f = unit_from_heading(b.heading);
  const Vec2 l{-f.y, f.x};
  return 0.5 * b.length * std::abs(f.dot(n)) + 0.5 * b.width * std::abs(l.dot(n));
}

}  // namespace

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const Vec2 d = b.center - a.center;
  const Vec2 fa = unit_from_heading(a.heading);
  const Vec2 fb = unit_from_heading(b.heading);
  const std::array<Vec2, 4> axes{fa, Vec2{-fa.y, fa.x}, fb, Vec2{-fb.y, fb.x}};
  for (const auto & n : axes) {
    const double gap = std::abs(d.dot(n)) - projected_radius(a, n) - projected_radius(b, n);
    if (gap >= 0.0) {
      return false;
    }
  }
  return true;
}

SegmentProjection project_onto_segment(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {distance(p, a + ab * t), t};
}

}  // namespace coopdrive
