#pragma once

#include <cmath>
#include <utility>

namespace lipflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline Vec2& operator-=(Vec2& a, Vec2 b) { a.x -= b.x; a.y -= b.y; return a; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) {
  double n = norm(a);
  return n > 0.0 ? a / n : Vec2{0.0, 0.0};
}

// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;
};

inline Mat2 operator+(Mat2 A, Mat2 B) {
  return {A.a11 + B.a11, A.a12 + B.a12, A.a21 + B.a21, A.a22 + B.a22};
}
inline Mat2 operator*(double s, Mat2 A) {
  return {s * A.a11, s * A.a12, s * A.a21, s * A.a22};
}
inline Vec2 operator*(Mat2 A, Vec2 v) {
  return {A.a11 * v.x + A.a12 * v.y, A.a21 * v.x + A.a22 * v.y};
}

inline Mat2 outer(Vec2 a, Vec2 b) {
  return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
}

inline Mat2 identity2() { return {1.0, 0.0, 0.0, 1.0}; }

inline Mat2 symmetrized(Mat2 A) {
  double off = 0.5 * (A.a12 + A.a21);
  return {A.a11, off, off, A.a22};
}

// Spectral norm of a symmetric 2x2 matrix.
inline double sym_spectral_norm(Mat2 A) {
  double m = 0.5 * (A.a11 + A.a22);
  double d = 0.5 * (A.a11 - A.a22);
  double r = std::sqrt(d * d + A.a12 * A.a12);
  return std::max(std::abs(m + r), std::abs(m - r));
}

// Eigenvalues of a symmetric 2x2 matrix, {min, max}.
inline std::pair<double, double> sym_eigenvalues(Mat2 A) {
  double m = 0.5 * (A.a11 + A.a22);
  double d = 0.5 * (A.a11 - A.a22);
  double r = std::sqrt(d * d + A.a12 * A.a12);
  return {m - r, m + r};
}

// Solves A v = b; returns false if A is numerically singular.
inline bool solve2x2(Mat2 A, Vec2 b, Vec2& v) {
  double det = A.a11 * A.a22 - A.a12 * A.a21;
  double scale = std::max({std::abs(A.a11), std::abs(A.a12), std::abs(A.a21), std::abs(A.a22), 1e-300});
  if (std::abs(det) < 1e-14 * scale * scale) return false;
  v = {(A.a22 * b.x - A.a12 * b.y) / det, (A.a11 * b.y - A.a21 * b.x) / det};
  return true;
}

}  // namespace lipflow
