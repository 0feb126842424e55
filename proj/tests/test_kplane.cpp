#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "strainmap/errors.hpp"
#include "strainmap/kplane.hpp"
#include "strainmap/rng.hpp"

using namespace strainmap;

namespace {

constexpr double kPi = std::numbers::pi;

// Random sides that admit a comparison triangle for this k, kept away from
// the degenerate boundary by a 1% margin of the feasible pr-range.
TriangleSides random_sides(Rng& rng, double k) {
  double scale = (k > 0) ? (2.0 * kPi / std::sqrt(k)) / 4.5 : 2.0;
  double pq = rng.uniform(0.05, scale);
  double qr = rng.uniform(0.05, scale);
  double lo = std::abs(pq - qr), hi = pq + qr;
  if (k > 0) hi = std::min(hi, 2.0 * kPi / std::sqrt(k) - pq - qr);
  double margin = 0.01 * (hi - lo);
  double pr = rng.uniform(lo + margin, hi - margin);
  return TriangleSides{qr, pq, pr};
}

}  // namespace

TEST_CASE("triangle_exists basic cases") {
  CHECK(triangle_exists(CurvatureBound{0}, {1, 1, 1}));
  CHECK_FALSE(triangle_exists(CurvatureBound{0}, {3, 1, 1}));
  // perimeter 6.6 > 2*pi on the unit sphere
  CHECK_FALSE(triangle_exists(CurvatureBound{1}, {2.2, 2.2, 2.2}));
  CHECK(triangle_exists(CurvatureBound{1}, {2.0, 2.0, 2.0}));
  CHECK(triangle_exists(CurvatureBound{-1}, {3, 2, 2}));
  CHECK_FALSE(triangle_exists(CurvatureBound{0}, {-1, 1, 1}));
  // boundary case passes within tolerance
  CHECK(triangle_exists(CurvatureBound{0}, {2, 1, 1}));
}

TEST_CASE("comparison_angle reference values") {
  CHECK(comparison_angle(CurvatureBound{0}, 1, 1, 1) == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK(comparison_angle(CurvatureBound{0}, 1, 1, 2) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(comparison_angle(CurvatureBound{1}, kPi / 2, kPi / 2, kPi / 2) ==
        doctest::Approx(kPi / 2).epsilon(1e-12));
  // frozen from a 50-digit evaluation of the hyperbolic law of cosines
  CHECK(comparison_angle(CurvatureBound{-1}, 1, 1, 1.5) ==
        doctest::Approx(1.5500227850444736).epsilon(1e-14));
}

TEST_CASE("comparison_angle errors") {
  CHECK_THROWS_AS(comparison_angle(CurvatureBound{0}, 0, 1, 1), DegenerateVertex);
  CHECK_THROWS_AS(comparison_angle(CurvatureBound{0}, 1, 0, 1), DegenerateVertex);
  CHECK_THROWS_AS(comparison_angle(CurvatureBound{0}, 1, 1, 2.5), NoTriangle);
  CHECK_THROWS_AS(comparison_angle(CurvatureBound{1}, 2.1, 2.1, 2.1), NoTriangle);
}

TEST_CASE("cosine clamp distinguishes rounding from invalid sides") {
  // With a loose existence tolerance the cosine can leave [-1,1]; a tiny
  // excursion clamps to pi, a large one is rejected.
  CHECK(comparison_angle(CurvatureBound{0}, 1, 1, 2 + 1e-9, 1e-6) == doctest::Approx(kPi));
  CHECK_THROWS_AS(comparison_angle(CurvatureBound{0}, 1, 1, 2 + 1e-7, 1e-6), NoTriangle);
}

TEST_CASE("embed_triangle planar examples") {
  auto tri = embed_triangle(CurvatureBound{0}, {1, 1, 1});
  CHECK(tri[0][0] == doctest::Approx(0.0));
  CHECK(tri[1][0] == doctest::Approx(1.0));
  CHECK(tri[2][0] == doctest::Approx(0.5));
  CHECK(tri[2][1] == doctest::Approx(std::sqrt(3.0) / 2));

  // sides (a,b,c) = (3,4,5): right angle at the vertex between sides 3 and 4
  auto pyth = embed_triangle(CurvatureBound{0}, {3, 4, 5});
  CHECK(embedded_vertex_angle(CurvatureBound{0}, pyth[0], pyth[1], pyth[2]) ==
        doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("embed_triangle sphere round trip side lengths") {
  Rng rng(20240601);
  CurvatureBound k{1};
  for (int t = 0; t < 200; ++t) {
    auto s = random_sides(rng, k.k);
    auto tri = embed_triangle(k, s);
    CHECK(model_distance(k, tri[0], tri[1]) == doctest::Approx(s.b).epsilon(1e-10));
    CHECK(model_distance(k, tri[1], tri[2]) == doctest::Approx(s.a).epsilon(1e-10));
    CHECK(model_distance(k, tri[0], tri[2]) == doctest::Approx(s.c).epsilon(1e-10));
  }
}

TEST_CASE("angle round trip against the embedding oracle") {
  for (double k : {-1.0, 0.0, 1.0}) {
    Rng rng(777 + static_cast<std::uint64_t>(k + 2));
    for (int t = 0; t < 1000; ++t) {
      auto s = random_sides(rng, k);
      double direct = comparison_angle(CurvatureBound{k}, s.b, s.a, s.c);
      auto tri = embed_triangle(CurvatureBound{k}, s);
      double measured = embedded_vertex_angle(CurvatureBound{k}, tri[0], tri[1], tri[2]);
      CHECK(std::abs(direct - measured) < 1e-9);
    }
  }
}

TEST_CASE("angle monotone in the opposite side") {
  Rng rng(99);
  for (double k : {-1.0, 0.0, 1.0}) {
    for (int t = 0; t < 300; ++t) {
      auto s = random_sides(rng, k);
      double lo = std::abs(s.b - s.a), hi = s.b + s.a;
      if (k > 0) hi = std::min(hi, 2.0 * kPi / std::sqrt(k) - s.b - s.a);
      double pr1 = rng.uniform(lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo));
      double pr2 = rng.uniform(lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo));
      if (pr1 > pr2) std::swap(pr1, pr2);
      double a1 = comparison_angle(CurvatureBound{k}, s.b, s.a, pr1);
      double a2 = comparison_angle(CurvatureBound{k}, s.b, s.a, pr2);
      CHECK(a1 <= a2 + 1e-12);
    }
  }
}

TEST_CASE("flat angle scale invariant") {
  Rng rng(4242);
  for (int t = 0; t < 300; ++t) {
    auto s = random_sides(rng, 0.0);
    double lam = rng.uniform(0.1, 10.0);
    double base = comparison_angle(CurvatureBound{0}, s.b, s.a, s.c);
    double scaled = comparison_angle(CurvatureBound{0}, lam * s.b, lam * s.a, lam * s.c);
    CHECK(base == doctest::Approx(scaled).epsilon(1e-10));
  }
}

TEST_CASE("boundary collinear configurations") {
  for (double k : {-1.0, 0.0, 1.0}) {
    CHECK(comparison_angle(CurvatureBound{k}, 0.8, 0.5, 1.3) == doctest::Approx(kPi).epsilon(1e-7));
    CHECK(comparison_angle(CurvatureBound{k}, 0.8, 0.5, 0.3) == doctest::Approx(0.0).epsilon(1e-7));
  }
}
