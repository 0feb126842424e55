#ifndef STRAINMAP_THRESHOLDS_HPP
#define STRAINMAP_THRESHOLDS_HPP

#include <algorithm>
#include <numbers>

namespace strainmap {

// Frozen envelope relating the angle-consistency defect of two segments
// (measured against distant orthogonal arms) to the angle between their
// image-space difference vectors. Calibrated on planar pilot runs with
// arm/radius ratio >= 250 and 4e5 random segment pairs. Measured: the angle
// tracks the defect one-to-one (angle <= defect + 0.006) below pi/2; at
// pi/2 the unsigned arm angles fold and near-opposite segments reach angle
// pi, so the envelope jumps there. Frozen with margin as a monotone table.
inline double kappa_hat(double consistency_defect) {
  static constexpr double eps[] = {0.0, 0.05, 0.10, 0.20, 0.40, 0.80, 1.20, 1.54};
  static constexpr double cap[] = {0.03, 0.075, 0.13, 0.24, 0.46, 0.90, 1.35, 1.70};
  constexpr int n = 8;
  if (consistency_defect >= eps[n - 1]) return std::numbers::pi;
  int hi = 1;
  while (consistency_defect > eps[hi]) ++hi;
  double t = (consistency_defect - eps[hi - 1]) / (eps[hi] - eps[hi - 1]);
  return std::min(std::numbers::pi, cap[hi - 1] + t * (cap[hi] - cap[hi - 1]));
}

// Default tolerance slots. Every "almost" comparison in the toolkit reads its
// threshold from an explicit value; these are the recorded defaults.
struct Thresholds {
  double transport_slack = 1e-9;        // allowed excess over 2*delta for carried strainers
  double residual_spacing_factor = 3.0; // step residual cap, in units of sample spacing
  double validate_tol_rel = 1e-9;       // metric validation, relative to diameter
};

}  // namespace strainmap

#endif
