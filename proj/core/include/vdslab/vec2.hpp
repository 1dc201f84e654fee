#pragma once

#include <cmath>

namespace vdslab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, const Vec2& v) { return {c * v.x, c * v.y}; }

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

}  // namespace vdslab
