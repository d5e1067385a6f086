#ifndef CONFLAT_VEC_HPP
#define CONFLAT_VEC_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace conflat {

// Point in R^d, d in {2,3}. The third coordinate is kept at zero in d=2 so
// most geometry code does not need to branch on the dimension.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  Vec operator+(const Vec& o) const { return {{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2]}}; }
  Vec operator-(const Vec& o) const { return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2]}}; }
  Vec operator*(double s) const { return {{c[0] * s, c[1] * s, c[2] * s}}; }
  bool operator==(const Vec& o) const { return c == o.c; }

  double dot(const Vec& o) const { return c[0] * o.c[0] + c[1] * o.c[1] + c[2] * o.c[2]; }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
};

inline double dot(const Vec& a, const Vec& b) { return a.dot(b); }

inline Vec cross(const Vec& a, const Vec& b) {
  return {{a.c[1] * b.c[2] - a.c[2] * b.c[1], a.c[2] * b.c[0] - a.c[0] * b.c[2],
           a.c[0] * b.c[1] - a.c[1] * b.c[0]}};
}

inline Vec lerp(const Vec& a, const Vec& b, double t) { return a + (b - a) * t; }

inline double dist0(const Vec& a, const Vec& b) { return (a - b).norm(); }

// Edge weights are rounded to multiples of 2^-40 so that shortest-path sums
// (here always < 2^13 length units) are exact in double arithmetic: distance
// symmetry and the triangle inequality then hold exactly, not just to an ulp.
inline double quantize_weight(double w) {
  constexpr double q = 1099511627776.0;  // 2^40
  return std::round(w * q) / q;
}

// Euclidean distance from p to segment [a,b], plus the clamped projection
// parameter.
inline double point_segment_dist(const Vec& p, const Vec& a, const Vec& b, double* t_out = nullptr) {
  const Vec ab = b - a;
  const double len2 = ab.norm2();
  double t = 0.0;
  if (len2 > 0.0) {
    t = (p - a).dot(ab) / len2;
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
  }
  if (t_out) *t_out = t;
  return dist0(p, a + ab * t);
}

}  // namespace conflat

#endif
