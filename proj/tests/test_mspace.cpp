#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "strainmap/errors.hpp"
#include "strainmap/mspace.hpp"
#include "strainmap/rng.hpp"

using namespace strainmap;

namespace {
constexpr double kPi = std::numbers::pi;

std::string temp_path(const char* name) {
  return std::string("/tmp/strainmap_test_") + name;
}
}  // namespace

TEST_CASE("antipodal pair on the unit sphere") {
  auto space = sphere_space_from_units(1.0, {{0, 0, 1}, {0, 0, -1}});
  CHECK(space.d(0, 1) == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("sampler outputs validate with tiny defect") {
  auto sph = sample_sphere(1.0, 60, 11);
  auto rep = validate(sph, 1e-12 * sph.diameter());
  CHECK(rep.valid);
  auto tor = sample_flat_torus(1.0, 1.0, 60, 12);
  CHECK(validate(tor, 1e-12 * tor.diameter()).valid);
  auto box = sample_euclid_box({1.0, 1.0}, 60, 13);
  CHECK(validate(box, 1e-12 * box.diameter()).valid);
}

TEST_CASE("sphere radius scales distances linearly") {
  auto s1 = sample_sphere(1.0, 40, 99);
  auto s2 = sample_sphere(2.0, 40, 99);
  for (PointId i = 0; i < 40; ++i)
    for (PointId j = 0; j < 40; ++j)
      CHECK(s2.d(i, j) == doctest::Approx(2.0 * s1.d(i, j)).epsilon(1e-15));
}

TEST_CASE("flat torus wraps around") {
  auto space = torus_space_from_coords(2.0, 1.0, {{0.0, 0.0}, {1.8, 0.0}});
  CHECK(space.d(0, 1) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("1d box distances") {
  auto space = euclid_space_from_coords({{0.0}, {0.5}, {1.0}});
  CHECK(space.d(0, 2) == doctest::Approx(1.0));
  CHECK(space.d(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("box distances match brute force recomputation") {
  auto box = sample_euclid_box({1.0, 2.0, 0.5}, 30, 5);
  for (PointId i = 0; i < 30; ++i)
    for (PointId j = i + 1; j < 30; ++j) {
      double s = 0;
      for (int d = 0; d < 3; ++d) {
        double t = box.model.coords[i][d] - box.model.coords[j][d];
        s += t * t;
      }
      CHECK(box.d(i, j) == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
    }
}

TEST_CASE("perturbation") {
  auto box = sample_euclid_box({1.0, 1.0}, 50, 21);

  SUBCASE("amplitude zero is the identity") {
    auto same = perturb_metric(box, 0.0, 7);
    CHECK(same.matrix() == box.matrix());
  }

  SUBCASE("output validates and stays within the amplitude") {
    const double amp = 0.2;
    auto pert = perturb_metric(box, amp, 7);
    CHECK(validate(pert).valid);
    double worst = 0;
    for (PointId i = 0; i < box.size(); ++i)
      for (PointId j = i + 1; j < box.size(); ++j)
        worst = std::max(worst, std::abs(pert.d(i, j) / box.d(i, j) - 1.0));
    CHECK(worst <= amp + 1e-12);
    CHECK(worst > 0.0);
  }

  SUBCASE("amplitude out of range rejected") {
    CHECK_THROWS_AS(perturb_metric(box, 0.5, 1), std::invalid_argument);
  }
}

TEST_CASE("validate flags a forced triangle violation") {
  std::vector<double> m = {0, 1, 10,
                           1, 0, 1,
                           10, 1, 0};
  FiniteMetricSpace bad(3, m);
  auto rep = validate(bad, 1e-9);
  CHECK_FALSE(rep.valid);
  CHECK(rep.worst_triangle_defect == doctest::Approx(8.0));
}

TEST_CASE("metric closure repairs a random symmetric matrix") {
  Rng rng(3);
  const std::size_t n = 25;
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = rng.uniform(0.1, 2.0);
      m[i * n + j] = v;
      m[j * n + i] = v;
    }
  FiniteMetricSpace space(n, std::move(m));
  metric_closure(space);
  CHECK(validate(space, 1e-12).valid);
}

TEST_CASE("quadruple defect at a square corner") {
  auto corners = euclid_space_from_coords({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  // hinge at a corner: angles 45 + 90 + 45 degrees, defect pi
  double defect = quadruple_defect(corners, CurvatureBound{0}, 0, 1, 2, 3);
  CHECK(defect == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(defect >= kPi / 2);
}

TEST_CASE("quadruple defect with near-coincident points stays nonnegative") {
  auto space = euclid_space_from_coords({{0, 0}, {1, 0}, {1, 1e-9}, {0, 1}});
  CHECK(quadruple_defect(space, CurvatureBound{0}, 0, 1, 2, 3) >= -1e-9);
  CHECK_THROWS_AS(quadruple_defect(space, CurvatureBound{0}, 0, 1, 1, 3),
                  std::invalid_argument);
}

TEST_CASE("curvature certification on model spaces") {
  auto sph = sample_sphere(1.0, 120, 2024);
  auto scan = check_curvature_bound(sph, CurvatureBound{1}, 4000, 5);
  CHECK(scan.min_defect >= -1e-9);
  CHECK(scan.evaluated > 0);

  auto tor = sample_flat_torus(1.0, 1.0, 120, 2025);
  CHECK(check_curvature_bound(tor, CurvatureBound{0}, 4000, 6).min_defect >= -1e-9);

  // wrong bound: a dense sphere sample violates k = 4
  auto wrong = check_curvature_bound(sph, CurvatureBound{4}, 20000, 7);
  CHECK(wrong.min_defect < 0.0);
}

TEST_CASE("save and load round trip bit exactly") {
  auto box = sample_euclid_box({1.0, 1.0}, 17, 3);
  auto path = temp_path("roundtrip.msp");
  save(box, path);
  auto back = load(path);
  CHECK(back.matrix() == box.matrix());
  CHECK(back.model.kind == ModelKind::euclid_box);
  CHECK(back.model.coords == box.model.coords);
  REQUIRE(back.curvature_bound.has_value());
  CHECK(*back.curvature_bound == *box.curvature_bound);
  std::remove(path.c_str());
}

TEST_CASE("truncated file raises ParseError") {
  auto path = temp_path("truncated.msp");
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("N 3\nk none\n0 1 1\n1 0 1\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("hand-written 3-point file and invalid matrix") {
  auto path = temp_path("hand.msp");
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("N 3\nk 0\n0 1 2\n1 0 1\n2 1 0\n", f);
    std::fclose(f);
  }
  auto space = load(path);
  CHECK(space.d(0, 2) == 2.0);
  CHECK(space.d(1, 2) == 1.0);
  std::remove(path.c_str());

  auto bad_path = temp_path("bad.msp");
  {
    FILE* f = std::fopen(bad_path.c_str(), "w");
    std::fputs("N 3\nk 0\n0 1 10\n1 0 1\n10 1 0\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load(bad_path), ValidationError);
  std::remove(bad_path.c_str());
}
