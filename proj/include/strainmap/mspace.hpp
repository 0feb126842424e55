#ifndef STRAINMAP_MSPACE_HPP
#define STRAINMAP_MSPACE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strainmap/kplane.hpp"

namespace strainmap {

using PointId = std::size_t;

enum class ModelKind { none, sphere, flat_torus, euclid_box };

// Coordinates in the generating model space, kept so correspondences between
// two samples of the same model can be built later.
struct ModelInfo {
  ModelKind kind = ModelKind::none;
  std::vector<double> params;                // sphere: {radius}; torus: {L1, L2}; box: dims
  std::vector<std::vector<double>> coords;   // one tuple per point
};

std::string model_kind_name(ModelKind kind);

// Geodesic distance between two coordinate tuples of the same model.
double model_point_distance(const ModelInfo& m, const std::vector<double>& a,
                            const std::vector<double>& b);

// A finite metric space: a validated symmetric distance matrix over N points.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  FiniteMetricSpace(std::size_t n, std::vector<double> dist_matrix);

  std::size_t size() const { return n_; }
  double d(PointId i, PointId j) const { return dist_[i * n_ + j]; }
  void set_d(PointId i, PointId j, double v) {
    dist_[i * n_ + j] = v;
    dist_[j * n_ + i] = v;
  }
  const std::vector<double>& matrix() const { return dist_; }

  double diameter() const;
  // Mean distance to the nearest other point; the sampling resolution.
  double mean_nn_spacing() const;

  std::optional<double> curvature_bound;  // known lower bound of the model, if any
  ModelInfo model;

 private:
  std::size_t n_ = 0;
  std::vector<double> dist_;
};

// --- samplers ------------------------------------------------------------

// N points uniform on the round 2-sphere of the given radius, with exact
// great-circle distances. The same seed draws the same directions for every
// radius, so distances scale linearly with it.
FiniteMetricSpace sample_sphere(double radius, std::size_t n, std::uint64_t seed);

// Uniform points on the flat torus R^2 / (L1 Z x L2 Z); quotient metric as the
// minimum over the nine adjacent lattice shifts.
FiniteMetricSpace sample_flat_torus(double l1, double l2, std::size_t n,
                                    std::uint64_t seed);

// Uniform points in an axis-aligned box with Euclidean distances.
FiniteMetricSpace sample_euclid_box(const std::vector<double>& dims, std::size_t n,
                                    std::uint64_t seed);

// Deterministic constructions from explicit coordinates (exact inputs for
// tests and experiments; distances computed exactly as the samplers do).
FiniteMetricSpace sphere_space_from_units(double radius,
                                          const std::vector<std::array<double, 3>>& units);
FiniteMetricSpace torus_space_from_coords(double l1, double l2,
                                          const std::vector<std::vector<double>>& coords);
FiniteMetricSpace euclid_space_from_coords(const std::vector<std::vector<double>>& coords);

// --- validation and perturbation -----------------------------------------

struct ValidationReport {
  double worst_triangle_defect = 0.0;   // max over triples of d(x,z)-d(x,y)-d(y,z)
  PointId worst_triangle[3] = {0, 0, 0};
  double worst_symmetry_defect = 0.0;
  PointId worst_symmetry[2] = {0, 0};
  double worst_diagonal = 0.0;          // max |d(i,i)|
  double min_offdiagonal = 0.0;
  double tolerance = 0.0;
  bool valid = false;
};

// Scans all triples. Default tolerance is 1e-9 * diameter.
ValidationReport validate(const FiniteMetricSpace& space,
                          std::optional<double> tol = std::nullopt);

// Shortest-path closure over the complete weighted graph; repairs triangle
// inequality violations in place.
void metric_closure(FiniteMetricSpace& space);

// Multiplies each off-diagonal entry by an independent factor in
// [1-amplitude, 1+amplitude], then restores the triangle inequality by metric
// closure. amplitude = 0 returns the input unchanged.
FiniteMetricSpace perturb_metric(const FiniteMetricSpace& space, double amplitude,
                                 std::uint64_t seed);

// --- curvature condition --------------------------------------------------

// 2*pi minus the sum of the three comparison angles at hinge a of the
// quadruple (a; b, c, d). Nonnegative iff the quadruple satisfies the lower
// curvature bound k.
double quadruple_defect(const FiniteMetricSpace& space, CurvatureBound k, PointId a,
                        PointId b, PointId c, PointId d);

struct CurvatureScan {
  double min_defect = 0.0;
  PointId argmin[4] = {0, 0, 0, 0};  // hinge first
  std::size_t evaluated = 0;
  std::size_t skipped_no_triangle = 0;
};

// Samples `trials` random distinct quadruples (exhaustive when the total count
// of hinged quadruples is at most `trials`) and reports the minimum defect.
CurvatureScan check_curvature_bound(const FiniteMetricSpace& space, CurvatureBound k,
                                    std::size_t trials, std::uint64_t seed);

// --- file I/O --------------------------------------------------------------

// Text format: "N <count>", "k <decimal|none>", N full matrix rows with 17
// significant digits, then an optional "# coords <model> <params...>" block
// with one coordinate tuple per line. Round trips are bit exact.
void save(const FiniteMetricSpace& space, const std::string& path);
FiniteMetricSpace load(const std::string& path,
                       std::optional<double> validation_tol = std::nullopt);

}  // namespace strainmap

#endif
