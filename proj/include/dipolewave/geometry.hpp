#pragma once

#include <array>
#include <cmath>

namespace dipolewave {

struct Vec2 {
  double x = 0, y = 0;
  Vec2() = default;
  Vec2(double x, double y) : x(x), y(y) {}
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};
inline Vec2 operator*(double s, Vec2 v) { return v * s; }

// Rotation by +pi/2: J (x, y) = (-y, x).
inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

struct Mat2 {
  // row-major [[a, b], [c, d]]
  double a = 0, b = 0, c = 0, d = 0;
  Mat2() = default;
  Mat2(double a, double b, double c, double d) : a(a), b(b), c(c), d(d) {}
  static Mat2 diag(double p, double q) { return {p, 0, 0, q}; }
  static Mat2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }
  static Mat2 symOuter(Vec2 u, Vec2 v) {
    Mat2 m = outer(u, v), mt = outer(v, u);
    return (m + mt) * 0.5;
  }
  Mat2 operator+(Mat2 o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(Mat2 o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  Mat2& operator+=(Mat2 o) { a += o.a; b += o.b; c += o.c; d += o.d; return *this; }
  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 transpose() const { return {a, c, b, d}; }
  double det() const { return a * d - b * c; }
  // S M S with S = diag(1, -1); conjugation under vertical reflection of a center.
  Mat2 reflectConj() const { return {a, -b, -c, d}; }
};
inline Mat2 operator*(double s, Mat2 m) { return m * s; }

}  // namespace dipolewave
