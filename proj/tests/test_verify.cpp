#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "strainmap/chart.hpp"
#include "strainmap/errors.hpp"
#include "strainmap/glue.hpp"
#include "strainmap/mspace.hpp"
#include "strainmap/rng.hpp"
#include "strainmap/strainer.hpp"
#include "strainmap/verify.hpp"

using namespace strainmap;

namespace {

// Regular planar grid with four distant orthogonal arms; pitch-aligned
// constructions land exactly on sample points.
struct GridRig {
  FiniteMetricSpace space;
  Chart chart;
  double pitch;
  std::size_t per_side;

  PointId at(double x, double y) const {
    std::size_t ix = static_cast<std::size_t>(std::llround(x / pitch));
    std::size_t iy = static_cast<std::size_t>(std::llround(y / pitch));
    return ix * per_side + iy;
  }
};

GridRig grid_rig(double pitch = 0.02) {
  const std::size_t per_side = static_cast<std::size_t>(std::llround(1.0 / pitch)) + 1;
  std::vector<std::vector<double>> pts;
  pts.reserve(per_side * per_side + 4);
  for (std::size_t ix = 0; ix < per_side; ++ix)
    for (std::size_t iy = 0; iy < per_side; ++iy)
      pts.push_back({ix * pitch, iy * pitch});
  const double arm = 100.0, c = 0.5;
  const std::size_t base_arm = pts.size();
  pts.push_back({c - arm, c});
  pts.push_back({c + arm, c});
  pts.push_back({c, c - arm});
  pts.push_back({c, c + arm});

  GridRig rig{euclid_space_from_coords(pts), Chart{}, pitch, per_side};
  Strainer s{rig.at(0.5, 0.5), {{base_arm, base_arm + 1}, {base_arm + 2, base_arm + 3}}};
  rig.chart = build_chart(rig.space, s, 2.0);  // all grid points
  return rig;
}

GHMap identity_table_map(const FiniteMetricSpace& s, const FiniteMetricSpace& t) {
  std::vector<PointId> table(s.size());
  for (PointId i = 0; i < s.size(); ++i) table[i] = i;
  return make_gh_map(s, t, std::move(table));
}

struct BoxExperiment {
  FiniteMetricSpace source;
  FiniteMetricSpace target;
  GHMap h;
  GlueConfig cfg;
  GlueContext ctx;
  GlueResult result;
};

BoxExperiment box_experiment(std::size_t n, double amplitude, std::uint64_t seed) {
  BoxExperiment ex{sample_euclid_box({1.0, 1.0}, n, seed),
                   FiniteMetricSpace{},
                   GHMap{},
                   GlueConfig{},
                   GlueContext{},
                   GlueResult{}};
  ex.target = perturb_metric(ex.source, amplitude, seed + 1);
  ex.h = identity_table_map(ex.source, ex.target);
  ex.cfg.delta = 0.35;
  ex.cfg.R = 0.08;
  ex.cfg.dim = 2;
  ex.cfg.seed = 7;
  ex.ctx = build_glue_context(ex.source, ex.target, ex.h, ex.cfg);
  ex.result = glue_run(ex.ctx);
  return ex;
}

}  // namespace

TEST_CASE("distance report of an isometric gluing is zero") {
  auto box = sample_euclid_box({1.0, 1.0}, 700, 40);
  auto h = identity_table_map(box, box);
  GlueConfig cfg;
  cfg.delta = 0.35;
  cfg.R = 0.08;
  cfg.dim = 2;
  cfg.seed = 7;
  auto res = glue(box, box, h, cfg);
  auto rep = distance_report(res, box, box, 0.05, 1.0);
  CHECK_FALSE(rep.empty);
  CHECK(rep.overall.max_defect == 0.0);
  CHECK(rep.overall.mean_defect == 0.0);

  SUBCASE("band excluding every pair is flagged") {
    auto rep2 = distance_report(res, box, box, 5.0, 6.0);
    CHECK(rep2.empty);
    CHECK(rep2.overall.pair_count == 0);
  }

  SUBCASE("regime split separates the band") {
    CHECK(rep.split == doctest::Approx(cfg.R * std::pow(cfg.delta, 1.5)));
    CHECK(rep.below_split.pair_count + rep.above_split.pair_count ==
          rep.overall.pair_count);
  }
}

TEST_CASE("claim sequences on the in-regime experiment") {
  auto ex = box_experiment(900, 0.006, 20240101);

  SUBCASE("nearest neighbor pair is a valid smoke input") {
    PointId y = ex.result.strained[0].id;
    PointId z = y;
    double best = 1e9;
    for (const auto& sp : ex.result.strained) {
      if (sp.id == y) continue;
      if (ex.source.d(y, sp.id) < best) {
        best = ex.source.d(y, sp.id);
        z = sp.id;
      }
    }
    REQUIRE(z != y);
    auto rep = claim_sequences(ex.ctx, y, z);
    CHECK(std::isfinite(rep.direct_defect));
    CHECK(std::isfinite(rep.recursive_defect));
    CHECK(rep.n2 >= 1);
  }

  SUBCASE("single shared center gives exact agreement") {
    int found = 0;
    for (std::size_t a = 0; a < ex.result.strained.size() && found < 8; ++a)
      for (std::size_t b = a + 1; b < ex.result.strained.size() && found < 8; ++b) {
        PointId y = ex.result.strained[a].id, z = ex.result.strained[b].id;
        if (ex.source.d(y, z) == 0.0) continue;
        auto rep = claim_sequences(ex.ctx, y, z);
        if (rep.n2 != 1) continue;
        CHECK(rep.recursive_defect == 0.0);
        ++found;
      }
    CHECK(found > 0);
  }

  SUBCASE("one or two centers inside the case-split window agree exactly") {
    const double split = ex.cfg.R * std::pow(ex.cfg.delta, 1.5);
    int found = 0;
    for (std::size_t a = 0; a < ex.result.strained.size(); ++a)
      for (std::size_t b = a + 1; b < ex.result.strained.size(); ++b) {
        PointId y = ex.result.strained[a].id, z = ex.result.strained[b].id;
        double d = ex.source.d(y, z);
        if (d == 0.0 || d >= split) continue;
        auto rep = claim_sequences(ex.ctx, y, z);
        if (rep.n2 > 2 || rep.n2 == 0) continue;
        CHECK(rep.recursive_defect == 0.0);
        ++found;
      }
    CHECK(found > 0);
  }

  SUBCASE("pairs inside the case-split window meet the envelope") {
    // the sequence construction addresses pairs below R * delta^{3/2}; the
    // relative defects are meaningful once |yz| clears the map resolution
    const double split = ex.cfg.R * std::pow(ex.cfg.delta, 1.5);
    int used = 0;
    for (std::size_t a = 0; a < ex.result.strained.size(); ++a)
      for (std::size_t b = a + 1; b < ex.result.strained.size(); ++b) {
        PointId y = ex.result.strained[a].id, z = ex.result.strained[b].id;
        double d = ex.source.d(y, z);
        if (d < ex.h.nu || d >= split) continue;
        auto rep = claim_sequences(ex.ctx, y, z);
        CHECK(rep.direct_defect <= 0.15);
        CHECK(rep.recursive_defect <= 0.15);
        ++used;
      }
    CHECK(used > 0);
  }

  SUBCASE("sub-resolution pairs are resolution limited") {
    // endpoints closer than the correspondence noise collapse to one target
    // sample, so the relative defect saturates near 1
    PointId y = 0, z = 0;
    double best = 1e9;
    for (std::size_t a = 0; a < ex.result.strained.size(); ++a)
      for (std::size_t b = a + 1; b < ex.result.strained.size(); ++b) {
        double d = ex.source.d(ex.result.strained[a].id, ex.result.strained[b].id);
        if (d > 0 && d < best) {
          best = d;
          y = ex.result.strained[a].id;
          z = ex.result.strained[b].id;
        }
      }
    if (best < 0.5 * ex.h.nu) {
      auto rep = claim_sequences(ex.ctx, y, z);
      CHECK(rep.direct_defect >= 0.5);
    }
  }

  SUBCASE("identical points are rejected") {
    CHECK_THROWS_AS(claim_sequences(ex.ctx, 0, 0), std::invalid_argument);
  }
}

TEST_CASE("center-of-mass weight counterexample") {
  auto rig = grid_rig();
  std::vector<PointId> Q{rig.at(0.2, 0.2), rig.at(0.7, 0.24), rig.at(0.4, 0.74)};

  SUBCASE("equal weights give no counterexample") {
    WeightVector W{{0.5, 0.3, 0.2}};
    auto rep = com_weight_counterexample(rig.chart, Q, W, W);
    CHECK(rep.com_distance == 0.0);
    CHECK_FALSE(rep.counterexample);
  }

  SUBCASE("shifted weights separate the centers of mass") {
    WeightVector W1{{0.5, 0.3, 0.2}}, W2{{0.3, 0.5, 0.2}};
    auto rep = com_weight_counterexample(rig.chart, Q, W1, W2);
    CHECK(rep.min_qr == 0.0);
    CHECK(rep.com_distance >= 0.01);
    CHECK(rep.counterexample);

    // the separation matches the image-space prediction up to chart
    // distortion and the two inverse residuals
    auto dist = distortion(rig.chart, 200000, 1);
    double tol = dist.max_defect * rep.image_prediction + rep.residual_q +
                 rep.residual_r + 1e-9;
    CHECK(std::abs(rep.com_distance - rep.image_prediction) <= tol);
  }
}

TEST_CASE("center-of-mass transport check") {
  auto rig = grid_rig();

  SUBCASE("grid-aligned rigid translates pass with tiny defects") {
    // segments are exact copies of (0.06, 0.08), length 0.1
    std::vector<PointId> Q{rig.at(0.20, 0.20), rig.at(0.26, 0.20), rig.at(0.20, 0.26)};
    std::vector<PointId> R{rig.at(0.26, 0.28), rig.at(0.32, 0.28), rig.at(0.26, 0.34)};
    const double third = 1.0 / 3.0;
    WeightVector W1{{third, third, third}};
    WeightVector W2{{third + 0.003, third - 0.003, third}};
    auto rep = com_transport_check(rig.chart, CurvatureBound{0}, Q, R, W1, W2);

    CHECK(rep.min_qr == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(rep.length_spread_excess <= 1e-12);
    CHECK(rep.angle_spread_max <= 0.01);
    CHECK(rep.weight_lhs <= 0.01 * rep.min_qr);  // hypothesis satisfied
    CHECK_FALSE(rep.zero_segment);
    CHECK(rep.max_ratio_defect <= 0.1);
    CHECK(rep.max_angle_defect <= 0.1);
  }

  SUBCASE("violated weight condition breaks the length conclusion") {
    // tiny segments, large weight shift
    std::vector<PointId> Q{rig.at(0.30, 0.30), rig.at(0.60, 0.30), rig.at(0.30, 0.60)};
    std::vector<PointId> R{rig.at(0.32, 0.30), rig.at(0.62, 0.30), rig.at(0.32, 0.60)};
    WeightVector W1{{0.6, 0.2, 0.2}}, W2{{0.2, 0.6, 0.2}};
    auto rep = com_transport_check(rig.chart, CurvatureBound{0}, Q, R, W1, W2);
    CHECK(rep.weight_lhs > rep.min_qr);  // hypothesis clearly violated
    CHECK(rep.max_ratio_defect >= 0.5);
  }

  SUBCASE("single segment with unit weight is exact") {
    std::vector<PointId> Q{rig.at(0.40, 0.40)};
    std::vector<PointId> R{rig.at(0.46, 0.48)};
    WeightVector W{{1.0}};
    auto rep = com_transport_check(rig.chart, CurvatureBound{0}, Q, R, W, W);
    CHECK(rep.com_q == Q[0]);
    CHECK(rep.com_r == R[0]);
    CHECK(rep.max_ratio_defect == 0.0);
    CHECK(rep.max_angle_defect == 0.0);
  }

  SUBCASE("coincident lists trip the zero segment guard") {
    std::vector<PointId> Q{rig.at(0.30, 0.30), rig.at(0.50, 0.30)};
    WeightVector W{{0.5, 0.5}};
    auto rep = com_transport_check(rig.chart, CurvatureBound{0}, Q, Q, W, W);
    CHECK(rep.com_distance == 0.0);
    CHECK(rep.zero_segment);
    CHECK(rep.ratio_defects.empty());
    CHECK(rep.max_angle_defect == 0.0);
  }
}

TEST_CASE("local angle spread") {
  auto ex = box_experiment(900, 0.006, 20240101);

  SUBCASE("identity-like gluing keeps the spread small") {
    Rng rng(43);
    int used = 0, singles = 0;
    for (int t = 0; t < 400 && used < 40; ++t) {
      PointId y = ex.result.strained[rng.below(ex.result.strained.size())].id;
      PointId z = ex.result.strained[rng.below(ex.result.strained.size())].id;
      if (y == z || ex.source.d(y, z) > 0.02) continue;
      auto rep = local_angle_spread(ex.ctx, y, z);
      if (rep.live.size() <= 1) {
        // single usable center: the spread is zero by construction
        CHECK(rep.max_spread == 0.0);
        ++singles;
        continue;
      }
      CHECK(rep.max_spread <= 0.2);
      ++used;
    }
    CHECK(used + singles > 0);
  }
}
