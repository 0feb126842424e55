#ifndef STRAINMAP_CHART_HPP
#define STRAINMAP_CHART_HPP

#include <cstddef>
#include <vector>

#include "strainmap/mspace.hpp"
#include "strainmap/strainer.hpp"
#include "strainmap/vecmath.hpp"

namespace strainmap {

// Strainer coordinates around a base point: q maps to the vector of distances
// to the first arm of each pair, restricted to a metric ball. The map is a
// near isometry when the arms are long relative to the ball.
struct Chart {
  const FiniteMetricSpace* space = nullptr;
  PointId base = 0;
  Strainer strainer;
  double radius = 0.0;
  std::vector<PointId> domain;       // ids within radius of base, ascending
  std::vector<Vec> image;            // image[m] = coordinates of domain[m]
};

// Distance vector from q to the a-arms; defined for every point of the space.
Vec arm_distances(const FiniteMetricSpace& space, const Strainer& s, PointId q);

// Domain = all sample points within `radius` of the strainer's base.
Chart build_chart(const FiniteMetricSpace& space, const Strainer& s, double radius);

// Stored coordinate vector of a domain point; OutOfDomain otherwise.
const Vec& coords(const Chart& chart, PointId q);

struct InverseResult {
  PointId id = 0;
  double residual = 0.0;  // Euclidean gap between the target and the chosen image
};

// Discrete inverse: the domain point whose image is closest to v, ties broken
// by the smallest id. The residual tells the caller how far v was from the
// sampled image.
InverseResult inverse(const Chart& chart, const Vec& v);

struct DistortionStats {
  double max_defect = 0.0;   // worst | |f(x)f(y)| / |xy| - 1 |
  double mean_defect = 0.0;
  PointId worst_x = 0, worst_y = 0;
  std::size_t pair_count = 0;
  bool subsampled = false;
};

// Exhaustive over domain pairs up to `pair_cap`, seeded subsample beyond it.
DistortionStats distortion(const Chart& chart, std::size_t pair_cap = 1000000,
                           std::uint64_t seed = 0);

struct WeightVector {
  std::vector<double> w;
};

// Throws when the weights are negative or do not sum to 1 within 1e-12.
void check_weights(const WeightVector& W);

// Pullback of the Euclidean weighted average of the images of Q.
InverseResult center_of_mass(const Chart& chart, const std::vector<PointId>& Q,
                             const WeightVector& W);

// Residual of the exact vector identity relating two weighted averages:
// (R_{W2} - Q_{W1}) - [ sum_j w1_j (r_j - q_j) + sum_j (w2_j - w1_j)(r_j - r_{j0}) ].
// Zero up to rounding for any inputs.
Vec mass_vector_residual(const std::vector<Vec>& Qv, const std::vector<Vec>& Rv,
                         const WeightVector& W1, const WeightVector& W2, std::size_t j0);

struct SegmentDefect {
  double angle = 0.0;         // angle between the two difference vectors
  double ratio_defect = 0.0;  // |1 - |u| / |v||
};

// Almost-parallel / almost-equal measurement of two image-space segments.
SegmentDefect almost_equal_defect(const Vec& u_start, const Vec& u_end,
                                  const Vec& v_start, const Vec& v_end);

// Max over reference points of the difference between the comparison angles
// that the segments (x1, y1) and (x2, y2) subtend at the references. Small
// values with the strainer arms as references certify almost-parallel images.
double angle_consistency_defect(const FiniteMetricSpace& space, CurvatureBound k,
                                const std::vector<PointId>& refs, PointId x1, PointId y1,
                                PointId x2, PointId y2);

}  // namespace strainmap

#endif
