#ifndef STRAINMAP_VERIFY_HPP
#define STRAINMAP_VERIFY_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "strainmap/chart.hpp"
#include "strainmap/glue.hpp"
#include "strainmap/mspace.hpp"

namespace strainmap {

struct BandStats {
  std::size_t pair_count = 0;
  double max_defect = 0.0;
  double mean_defect = 0.0;
  PointId worst_y = 0, worst_z = 0;
};

// Distance preservation of the glued map over strained pairs whose source
// distance falls in [band_lo, band_hi]. The two regimes on either side of
// R * delta^{3/2} are reported separately: above it, closeness to the
// correspondence alone already controls the defect.
struct DistortionReport {
  double band_lo = 0.0, band_hi = 0.0;
  double split = 0.0;  // R * delta^{3/2}
  BandStats overall, below_split, above_split;
  bool empty = false;
};

DistortionReport distance_report(const GlueResult& result,
                                 const FiniteMetricSpace& source,
                                 const FiniteMetricSpace& target, double band_lo,
                                 double band_hi);

// For a strained pair (y, z): restrict the blending recursion to the centers
// where either point has positive weight, and compare it against the direct
// blend, the one-chart center of mass of the local images. Reports
//   direct_defect    = | |ybar zbar| - |yz| | / |yz|
//   recursive_defect = | |y_rec z_rec| - |ybar zbar| | / |yz|
// plus the per-step gap vectors between the two constructions.
struct ClaimReport {
  std::vector<std::size_t> live;  // center indices with weight on y or z, cover order
  std::size_t n2 = 0;
  PointId y_final = 0, z_final = 0;
  PointId ybar_final = 0, zbar_final = 0;
  double direct_defect = 0.0;
  double recursive_defect = 0.0;
  std::vector<double> alpha_mags;  // |(g(y_m)-g(z_m)) - (g(ybar_m)-g(zbar_m))| per step
  std::vector<PointId> ybar_trace, zbar_trace;
  double max_inverse_residual = 0.0;
};

ClaimReport claim_sequences(const GlueContext& ctx, PointId y, PointId z);

// The weighted center of mass moves even when every sampled point stays put:
// with R = Q and different weights the center-of-mass segment has positive
// length while every |q_j r_j| is zero, so no length-ratio bound can hold.
struct ComCounterexampleReport {
  double com_distance = 0.0;
  double min_qr = 0.0;
  double image_prediction = 0.0;  // |sum (w2_j - w1_j) f(q_j)|
  PointId com_q = 0, com_r = 0;
  double residual_q = 0.0, residual_r = 0.0;
  bool counterexample = false;
  std::string verdict;
};

ComCounterexampleReport com_weight_counterexample(const Chart& chart,
                                                  const std::vector<PointId>& Q,
                                                  const WeightVector& W1,
                                                  const WeightVector& W2);

// Stability of the center-of-mass segment: hypothesis quantities (segment
// length spread, per-arm angle spread, weight condition) and conclusion
// defects (length ratio and arm angles of the center-of-mass segment against
// the individual segments).
struct ComTransportReport {
  // hypotheses
  double length_spread_excess = 0.0;  // max|q_j r_j| / min|q_j r_j| - 1
  double angle_spread_max = 0.0;      // worst arm of max_j - min_j angle(a_i, q_j, r_j)
  double weight_diff_sup = 0.0;       // sup norm of W1 - W2
  double max_rr = 0.0;                // max_{j,j'} |r_j r_{j'}|
  double weight_lhs = 0.0;            // weight_diff_sup * max_rr
  double min_qr = 0.0;
  // conclusions
  PointId com_q = 0, com_r = 0;
  double residual_q = 0.0, residual_r = 0.0;
  double com_distance = 0.0;
  bool zero_segment = false;  // centers of mass coincide; angle defects skipped
  std::vector<double> ratio_defects;               // per j
  std::vector<std::vector<double>> angle_defects;  // [arm][j]
  double max_ratio_defect = 0.0;
  double max_angle_defect = 0.0;
  std::size_t skipped_zero_segments = 0;
};

ComTransportReport com_transport_check(const Chart& chart, CurvatureBound k,
                                       const std::vector<PointId>& Q,
                                       const std::vector<PointId>& R,
                                       const WeightVector& W1, const WeightVector& W2);

// Spread, over the centers whose charts contain both y and z, of the
// comparison angle that a carried arm sees at the local images of (y, z).
// Small spread means the local maps transport the segment consistently.
struct AngleSpreadEntry {
  std::size_t ref_center = 0;  // center index providing the reference arm
  std::size_t arm = 0;
  double spread = 0.0;
};

struct LocalAngleSpreadReport {
  std::vector<std::size_t> live;  // center indices whose f-chart ball holds y and z
  std::vector<AngleSpreadEntry> entries;
  double max_spread = 0.0;
  std::size_t skipped_degenerate = 0;  // centers where the local images collide
};

LocalAngleSpreadReport local_angle_spread(const GlueContext& ctx, PointId y, PointId z);

}  // namespace strainmap

#endif
