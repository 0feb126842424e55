#ifndef STRAINMAP_KPLANE_HPP
#define STRAINMAP_KPLANE_HPP

#include <array>

namespace strainmap {

// Lower curvature bound of the comparison plane, units 1/length^2.
struct CurvatureBound {
  double k = 0.0;
};

// Side lengths of a triangle to be laid out on the k-plane. Roles: a = |qr|,
// b = |pq|, c = |pr|, with the vertex of interest at q.
struct TriangleSides {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// True iff a triangle with these sides exists on the k-plane: the triangle
// inequality holds and, for k > 0, the perimeter stays below 2*pi/sqrt(k).
// Both checks carry an additive tolerance of tol_rel times their scale.
bool triangle_exists(CurvatureBound k, const TriangleSides& s, double tol_rel = 1e-12);

// Vertex angle at q of the comparison triangle with |pq|, |qr|, |pr| as given,
// clamped to [0, pi]. Throws DegenerateVertex when pq or qr vanishes and
// NoTriangle when the sides admit no comparison triangle. Cosine arguments are
// clamped to [-1, 1]; an excursion beyond 1e-8 is treated as invalid input
// rather than rounding and raises NoTriangle.
double comparison_angle(CurvatureBound k, double pq, double qr, double pr,
                        double tol_rel = 1e-12);

using Vec3 = std::array<double, 3>;

// Concrete layout of the comparison triangle in a model of the k-plane:
// the Euclidean plane (z = 0), the round sphere of radius 1/sqrt(k) in R^3,
// or the unit-scaled hyperboloid in Minkowski R^{2,1}. Returns vertices
// (p, q, r) with |pq| = s.b, |qr| = s.a, |pr| = s.c; p sits at the model
// origin and q along the first axis. Serves as the measurement oracle for
// comparison_angle.
std::array<Vec3, 3> embed_triangle(CurvatureBound k, const TriangleSides& s);

// Geodesic distance between two embedded points of the same model.
double model_distance(CurvatureBound k, const Vec3& u, const Vec3& v);

// Angle at vertex q between the geodesics toward p and r, measured with
// tangent-space projections (independent of any law of cosines).
double embedded_vertex_angle(CurvatureBound k, const Vec3& p, const Vec3& q,
                             const Vec3& r);

}  // namespace strainmap

#endif
