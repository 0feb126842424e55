#include "strainmap/kplane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "strainmap/errors.hpp"

namespace strainmap {

namespace {

constexpr double kPi = std::numbers::pi;
// Excursions of a cosine beyond [-1, 1] up to this size are rounding noise;
// anything larger means the sides were not a valid triangle.
constexpr double kCosClampSlack = 1e-8;

double clamped_acos(double c) {
  if (c > 1.0) {
    if (c > 1.0 + kCosClampSlack) throw NoTriangle("cosine argument " + std::to_string(c));
    c = 1.0;
  } else if (c < -1.0) {
    if (c < -1.0 - kCosClampSlack) throw NoTriangle("cosine argument " + std::to_string(c));
    c = -1.0;
  }
  return std::acos(c);
}

double minkowski(const Vec3& u, const Vec3& v) {
  return u[0] * v[0] + u[1] * v[1] - u[2] * v[2];
}

}  // namespace

bool triangle_exists(CurvatureBound k, const TriangleSides& s, double tol_rel) {
  if (s.a < 0 || s.b < 0 || s.c < 0) return false;
  const double perimeter = s.a + s.b + s.c;
  const double tol = tol_rel * perimeter;
  if (s.a > s.b + s.c + tol) return false;
  if (s.b > s.a + s.c + tol) return false;
  if (s.c > s.a + s.b + tol) return false;
  if (k.k > 0) {
    const double limit = 2.0 * kPi / std::sqrt(k.k);
    if (perimeter > limit + tol_rel * limit) return false;
  }
  return true;
}

double comparison_angle(CurvatureBound k, double pq, double qr, double pr,
                        double tol_rel) {
  if (pq == 0.0 || qr == 0.0)
    throw DegenerateVertex("comparison angle with a vanishing side at the vertex");
  TriangleSides s{qr, pq, pr};
  if (!triangle_exists(k, s, tol_rel))
    throw NoTriangle("sides (" + std::to_string(pq) + ", " + std::to_string(qr) +
                     ", " + std::to_string(pr) + ") for k=" + std::to_string(k.k));

  double cosine;
  if (k.k == 0.0) {
    cosine = (pq * pq + qr * qr - pr * pr) / (2.0 * pq * qr);
  } else if (k.k > 0.0) {
    const double w = std::sqrt(k.k);
    cosine = (std::cos(w * pr) - std::cos(w * pq) * std::cos(w * qr)) /
             (std::sin(w * pq) * std::sin(w * qr));
  } else {
    const double w = std::sqrt(-k.k);
    cosine = (std::cosh(w * pq) * std::cosh(w * qr) - std::cosh(w * pr)) /
             (std::sinh(w * pq) * std::sinh(w * qr));
  }
  return clamped_acos(cosine);
}

std::array<Vec3, 3> embed_triangle(CurvatureBound k, const TriangleSides& s) {
  if (!triangle_exists(k, s))
    throw NoTriangle("sides (" + std::to_string(s.a) + ", " + std::to_string(s.b) +
                     ", " + std::to_string(s.c) + ") for k=" + std::to_string(k.k));

  if (k.k == 0.0) {
    Vec3 p{0.0, 0.0, 0.0};
    Vec3 q{s.b, 0.0, 0.0};
    double x, y;
    if (s.b == 0.0) {
      x = s.c;  // p and q coincide
      y = 0.0;
    } else {
      x = (s.b * s.b + s.c * s.c - s.a * s.a) / (2.0 * s.b);
      double y2 = s.c * s.c - x * x;
      y = y2 > 0 ? std::sqrt(y2) : 0.0;
    }
    return {p, q, Vec3{x, y, 0.0}};
  }

  if (k.k > 0.0) {
    const double w = std::sqrt(k.k);
    const double r0 = 1.0 / w;
    // Angular sides on the unit sphere.
    const double tb = s.b * w, tc = s.c * w, ta = s.a * w;
    Vec3 p{0.0, 0.0, r0};
    Vec3 q{r0 * std::sin(tb), 0.0, r0 * std::cos(tb)};
    // Spherical angle at p between the arcs toward q and r.
    double phi = 0.0;
    if (tb > 0.0 && tc > 0.0) {
      phi = clamped_acos((std::cos(ta) - std::cos(tb) * std::cos(tc)) /
                         (std::sin(tb) * std::sin(tc)));
    }
    Vec3 r{r0 * std::sin(tc) * std::cos(phi), r0 * std::sin(tc) * std::sin(phi),
           r0 * std::cos(tc)};
    return {p, q, r};
  }

  const double w = std::sqrt(-k.k);
  const double r0 = 1.0 / w;
  const double tb = s.b * w, tc = s.c * w, ta = s.a * w;
  Vec3 p{0.0, 0.0, r0};
  Vec3 q{r0 * std::sinh(tb), 0.0, r0 * std::cosh(tb)};
  double phi = 0.0;
  if (tb > 0.0 && tc > 0.0) {
    phi = clamped_acos((std::cosh(tb) * std::cosh(tc) - std::cosh(ta)) /
                       (std::sinh(tb) * std::sinh(tc)));
  }
  Vec3 r{r0 * std::sinh(tc) * std::cos(phi), r0 * std::sinh(tc) * std::sin(phi),
         r0 * std::cosh(tc)};
  return {p, q, r};
}

double model_distance(CurvatureBound k, const Vec3& u, const Vec3& v) {
  if (k.k == 0.0) {
    const double dx = u[0] - v[0], dy = u[1] - v[1], dz = u[2] - v[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  if (k.k > 0.0) {
    const double r0 = 1.0 / std::sqrt(k.k);
    // atan2 form of the great-circle angle; stable near 0 and pi.
    const Vec3 cr{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                  u[0] * v[1] - u[1] * v[0]};
    const double sine = std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
    const double cosine = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    return r0 * std::atan2(sine / (r0 * r0), cosine / (r0 * r0));
  }
  const double w = std::sqrt(-k.k);
  double ch = -minkowski(u, v) * w * w;
  if (ch < 1.0) ch = 1.0;
  return std::acosh(ch) / w;
}

double embedded_vertex_angle(CurvatureBound k, const Vec3& p, const Vec3& q,
                             const Vec3& r) {
  auto gram_angle = [](double uu, double vv, double uv) {
    if (uu <= 0.0 || vv <= 0.0) throw DegenerateVertex("vertex angle with a zero tangent");
    double g = uu * vv - uv * uv;
    if (g < 0) g = 0;
    return std::atan2(std::sqrt(g), uv);
  };

  if (k.k == 0.0) {
    Vec3 u{p[0] - q[0], p[1] - q[1], p[2] - q[2]};
    Vec3 v{r[0] - q[0], r[1] - q[1], r[2] - q[2]};
    double uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    double vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    double uv = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    return gram_angle(uu, vv, uv);
  }

  if (k.k > 0.0) {
    const double r0sq = 1.0 / k.k;
    // Project p and r onto the tangent plane at q.
    auto tangent = [&](const Vec3& x) {
      const double c = (x[0] * q[0] + x[1] * q[1] + x[2] * q[2]) / r0sq;
      return Vec3{x[0] - c * q[0], x[1] - c * q[1], x[2] - c * q[2]};
    };
    Vec3 u = tangent(p), v = tangent(r);
    double uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    double vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    double uv = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    return gram_angle(uu, vv, uv);
  }

  const double wsq = -k.k;
  // <q,q> = -1/wsq on the hyperboloid; the tangent projection removes the
  // component along q, and the Minkowski form is positive definite there.
  auto tangent = [&](const Vec3& x) {
    const double c = minkowski(x, q) * wsq;
    return Vec3{x[0] + c * q[0], x[1] + c * q[1], x[2] + c * q[2]};
  };
  Vec3 u = tangent(p), v = tangent(r);
  return gram_angle(minkowski(u, u), minkowski(v, v), minkowski(u, v));
}

}  // namespace strainmap
