#ifndef STRAINMAP_GLUE_HPP
#define STRAINMAP_GLUE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "strainmap/chart.hpp"
#include "strainmap/mspace.hpp"
#include "strainmap/strainer.hpp"

namespace strainmap {

// A correspondence between two spaces with its measured quality: nu is the
// worst additive distance distortion over source pairs, covering_defect the
// worst distance from a target point to the image.
struct GHMap {
  const FiniteMetricSpace* source = nullptr;
  const FiniteMetricSpace* target = nullptr;
  std::vector<PointId> table;  // target id per source point
  double nu = 0.0;
  double covering_defect = 0.0;
};

struct GHDistortion {
  double nu = 0.0;
  double covering_defect = 0.0;
};

// Exhaustive recomputation of both quality measures.
GHDistortion gh_distortion(const GHMap& map);

// Wraps an explicit table and measures it.
GHMap make_gh_map(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                  std::vector<PointId> table);

// Maps each source point to the target sample nearest in the shared model;
// requires both spaces to carry coordinates of the same model.
GHMap nearest_point_map(const FiniteMetricSpace& source, const FiniteMetricSpace& target);

struct Cover {
  std::vector<PointId> centers;
  std::size_t multiplicity = 0;         // of the delta*R balls over the strained set
  std::vector<PointId> uncovered;       // strained points no eligible center reaches
};

// Greedy (delta*R/3)-net inside the strained set: repeatedly take the
// uncovered strained point of smallest id (skipping ineligible ones). Every
// covered strained point ends within delta*R/3 of some center.
Cover select_cover(const FiniteMetricSpace& space, const std::vector<PointId>& strained,
                   double delta, double R, std::uint64_t seed,
                   const std::vector<char>* eligible = nullptr);

// Tent weight of a center: 1 at the center, 0 from delta*R/2 outward,
// Lipschitz with constant 2/(delta*R).
double weight_value(const FiniteMetricSpace& space, PointId center, double delta,
                    double R, PointId x);

struct GlueConfig {
  double delta = 0.2;
  double R = 0.4;
  std::size_t dim = 2;        // strainer pair count n
  std::uint64_t seed = 1;
  SearchConfig search;
  double transport_slack = 1e-9;         // tolerance over 2*delta for carried strainers
  double residual_spacing_factor = 3.0;  // flag steps beyond this many spacings
  double f_radius_factor = 0.8;          // chart ball as a fraction of delta*R
  double g_radius_factor = 1.0;
  bool force = false;  // run even when nu >= delta^2 * R
};

// Charts for one cover center: f on the source around the center, g on the
// target around its image, built from the carried short strainer.
struct LocalPair {
  PointId center = 0;
  NestedStrainers nest;
  Strainer transported;
  double transported_delta_star = 0.0;
  Chart f_chart;
  Chart g_chart;
};

// g^{-1}(f(q)): the target sample point whose distances to the carried arms
// best match q's distances to the source arms. Defined for every source q.
InverseResult local_image(const LocalPair& lp, const FiniteMetricSpace& source, PointId q);

// Builds the nested strainers at the center, carries the short one through h,
// verifies its quality (below 2*delta + slack), and assembles both charts.
// Throws StrainerNotFound or TransportQualityFail.
LocalPair build_local_pair(const FiniteMetricSpace& source,
                           const FiniteMetricSpace& target, const GHMap& h,
                           PointId center, const GlueConfig& cfg);

struct DropRecord {
  PointId center = 0;
  std::string reason;
};

// Everything the blending recursion needs, immutable once built. Centers whose
// local pair cannot be built are dropped and the cover is rebuilt without them.
struct GlueContext {
  const FiniteMetricSpace* source = nullptr;
  const FiniteMetricSpace* target = nullptr;
  GHMap h;
  GlueConfig config;
  CurvatureBound k_source, k_target;
  std::vector<StrainedPoint> strained;
  Cover cover;
  std::vector<LocalPair> pairs;  // parallel to cover.centers
  std::vector<DropRecord> dropped;
  double target_spacing = 0.0;
};

GlueContext build_glue_context(const FiniteMetricSpace& source,
                               const FiniteMetricSpace& target, const GHMap& h,
                               const GlueConfig& cfg);

// One run of the blending recursion for z over the listed centers (indices
// into ctx.pairs, in order). Steps with zero weight leave the point unchanged.
struct BlendTrace {
  std::vector<std::size_t> steps;   // center indices where the point moved
  std::vector<PointId> values;      // point after each recorded step
  std::vector<double> residuals;    // inverse residual of each step
  PointId final_id = 0;
  double sigma = 0.0;               // total weight accumulated
  double max_residual = 0.0;
};

BlendTrace blend_over(const GlueContext& ctx, PointId z,
                      const std::vector<std::size_t>& center_idx);

struct PointDiagnostics {
  PointId z = 0;
  PointId hbar = 0;
  double sigma = 0.0;
  double closeness = 0.0;          // distance from h(z) to hbar(z)
  double max_step_residual = 0.0;
  std::size_t steps = 0;
  bool sigma_ok = false;           // sigma > 1/3
  bool residual_ok = false;
  std::vector<std::pair<std::size_t, PointId>> trace;  // (center index, value)
};

struct GlueResult {
  GlueConfig config;
  double nu = 0.0;
  double covering_defect = 0.0;
  bool regime_ok = false;  // nu < delta^2 * R
  std::vector<StrainedPoint> strained;
  Cover cover;
  std::vector<DropRecord> dropped;
  std::vector<PointDiagnostics> points;  // parallel to strained
  double target_spacing = 0.0;
};

GlueResult glue_run(const GlueContext& ctx);

// Convenience: context build plus run. Refuses to run outside the distortion
// regime nu < delta^2 * R unless cfg.force is set.
GlueResult glue(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                const GHMap& h, const GlueConfig& cfg);

}  // namespace strainmap

#endif
