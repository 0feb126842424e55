#ifndef STRAINMAP_VECMATH_HPP
#define STRAINMAP_VECMATH_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "strainmap/errors.hpp"

namespace strainmap {

using Vec = std::vector<double>;

inline void check_same_dim(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector dimensions differ");
}

inline Vec sub(const Vec& a, const Vec& b) {
  check_same_dim(a, b);
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec add(const Vec& a, const Vec& b) {
  check_same_dim(a, b);
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec scaled(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline void axpy(Vec& acc, double s, const Vec& a) {
  check_same_dim(acc, a);
  for (std::size_t i = 0; i < a.size(); ++i) acc[i] += s * a[i];
}

inline double dot(const Vec& a, const Vec& b) {
  check_same_dim(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Vec& a, const Vec& b) { return norm(sub(a, b)); }

// Angle between two nonzero vectors, computed through the Gram determinant so
// it stays accurate near 0 and pi.
inline double angle_between(const Vec& u, const Vec& v) {
  double uu = dot(u, u), vv = dot(v, v), uv = dot(u, v);
  if (uu == 0.0 || vv == 0.0) throw ZeroVector("angle of a zero vector");
  double gram = uu * vv - uv * uv;
  if (gram < 0) gram = 0;
  return std::atan2(std::sqrt(gram), uv);
}

}  // namespace strainmap

#endif
