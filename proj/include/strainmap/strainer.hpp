#ifndef STRAINMAP_STRAINER_HPP
#define STRAINMAP_STRAINER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strainmap/kplane.hpp"
#include "strainmap/mspace.hpp"

namespace strainmap {

// n pairs (a_i, b_i) around a base point acting as an approximate orthogonal
// frame: opposite arms nearly antipodal, mixed arms nearly perpendicular.
struct Strainer {
  PointId base = 0;
  std::vector<std::pair<PointId, PointId>> pairs;
  std::size_t n() const { return pairs.size(); }
};

struct StrainQuality {
  // Smallest delta for which every strainer inequality holds; the strainer is
  // an (n, delta)-strainer exactly when delta > delta_star.
  double delta_star = 0.0;
  double min_arm = 0.0;  // shortest arm length
  std::string worst_constraint;
};

// Measures delta_star as the largest shortfall across the four inequality
// families: pi - angle(a_i, p, b_i) and pi/2 - angle for the mixed pairs.
StrainQuality strain_quality(const FiniteMetricSpace& space, CurvatureBound k,
                             const Strainer& s);

// delta * (shortest arm length); the strainer is R-long at level delta
// exactly when the returned value exceeds R.
double rlong_radius(const FiniteMetricSpace& space, const Strainer& s, double delta);

struct SearchConfig {
  std::size_t budget = 20000;  // candidate comparison angles per search
  std::size_t restarts = 16;   // shuffled retries after the arm-length-sorted pass
};

// Greedy pair-by-pair search with randomized restarts. Returns a verified
// strainer with delta_star < delta that maximizes the shortest arm among the
// attempts examined, or nothing when the budget runs out first. When `pool`
// is given, arms are drawn from it only.
std::optional<Strainer> find_strainer(const FiniteMetricSpace& space, CurvatureBound k,
                                      PointId p, std::size_t n, double delta,
                                      const std::vector<PointId>* pool,
                                      std::uint64_t seed, const SearchConfig& cfg = {});

// A long strainer (arms > R/delta) together with a short one (arms > R) whose
// longest arm stays below delta times the long strainer's shortest arm.
struct NestedStrainers {
  Strainer long_s;
  Strainer short_s;
};

std::optional<NestedStrainers> nested_strainers(const FiniteMetricSpace& space,
                                                CurvatureBound k, PointId p,
                                                std::size_t n, double delta, double R,
                                                std::uint64_t seed,
                                                const SearchConfig& cfg = {});

struct StrainedPoint {
  PointId id = 0;
  Strainer witness;
  double delta_star = 0.0;
  double rlong = 0.0;  // delta * min arm of the witness
};

// Conservative under-approximation of the set of points carrying an R-long
// (n, delta)-strainer: every returned point has a re-verified witness. The
// witness search is independent of R, so raising R only filters the list.
std::vector<StrainedPoint> strained_set(const FiniteMetricSpace& space, CurvatureBound k,
                                        std::size_t n, double delta, double R,
                                        std::uint64_t seed, const SearchConfig& cfg = {});

}  // namespace strainmap

#endif
