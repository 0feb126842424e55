#include "strainmap/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "strainmap/errors.hpp"
#include "strainmap/rng.hpp"

namespace strainmap {

Vec arm_distances(const FiniteMetricSpace& space, const Strainer& s, PointId q) {
  Vec v(s.n());
  for (std::size_t i = 0; i < s.n(); ++i) v[i] = space.d(s.pairs[i].first, q);
  return v;
}

Chart build_chart(const FiniteMetricSpace& space, const Strainer& s, double radius) {
  if (radius <= 0) throw std::invalid_argument("chart radius must be positive");
  Chart chart;
  chart.space = &space;
  chart.base = s.base;
  chart.strainer = s;
  chart.radius = radius;
  for (PointId q = 0; q < space.size(); ++q)
    if (space.d(s.base, q) <= radius) {
      chart.domain.push_back(q);
      chart.image.push_back(arm_distances(space, s, q));
    }
  if (chart.domain.empty()) throw EmptyDomain("no sample points within the chart radius");
  return chart;
}

namespace {

// Index of q in the ascending domain list, or npos.
std::size_t domain_index(const Chart& chart, PointId q) {
  auto it = std::lower_bound(chart.domain.begin(), chart.domain.end(), q);
  if (it == chart.domain.end() || *it != q) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - chart.domain.begin());
}

}  // namespace

const Vec& coords(const Chart& chart, PointId q) {
  std::size_t m = domain_index(chart, q);
  if (m == static_cast<std::size_t>(-1))
    throw OutOfDomain("point " + std::to_string(q) + " is not in the chart domain");
  return chart.image[m];
}

InverseResult inverse(const Chart& chart, const Vec& v) {
  if (chart.domain.empty()) throw EmptyDomain("inverse on an empty chart");
  if (v.size() != chart.strainer.n())
    throw DimensionMismatch("coordinate vector has wrong dimension");
  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < chart.domain.size(); ++m) {
    double sq = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      double d = chart.image[m][i] - v[i];
      sq += d * d;
    }
    if (sq < best_sq) {  // strict: first (smallest id) wins ties
      best_sq = sq;
      best = m;
    }
  }
  return InverseResult{chart.domain[best], std::sqrt(best_sq)};
}

DistortionStats distortion(const Chart& chart, std::size_t pair_cap, std::uint64_t seed) {
  const std::size_t n = chart.domain.size();
  if (n < 2) throw EmptyDomain("distortion needs at least two domain points");
  DistortionStats st;

  auto defect_of = [&](std::size_t mi, std::size_t mj) {
    double dxy = chart.space->d(chart.domain[mi], chart.domain[mj]);
    double img = distance(chart.image[mi], chart.image[mj]);
    return std::abs(img / dxy - 1.0);
  };
  auto record = [&](std::size_t mi, std::size_t mj) {
    double d = defect_of(mi, mj);
    st.mean_defect += d;
    ++st.pair_count;
    if (d > st.max_defect) {
      st.max_defect = d;
      st.worst_x = chart.domain[mi];
      st.worst_y = chart.domain[mj];
    }
  };

  const std::size_t total = n * (n - 1) / 2;
  if (total <= pair_cap) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) record(i, j);
  } else {
    st.subsampled = true;
    Rng rng(seed);
    for (std::size_t t = 0; t < pair_cap; ++t) {
      std::size_t i = rng.below(n), j = rng.below(n);
      if (i == j) continue;
      record(std::min(i, j), std::max(i, j));
    }
  }
  if (st.pair_count) st.mean_defect /= static_cast<double>(st.pair_count);
  return st;
}

void check_weights(const WeightVector& W) {
  double sum = 0;
  for (double w : W.w) {
    if (w < 0) throw std::invalid_argument("weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("weights must sum to 1 (got " + std::to_string(sum) + ")");
}

InverseResult center_of_mass(const Chart& chart, const std::vector<PointId>& Q,
                             const WeightVector& W) {
  if (Q.empty() || Q.size() != W.w.size())
    throw DimensionMismatch("point list and weights differ in length");
  check_weights(W);
  Vec target(chart.strainer.n(), 0.0);
  for (std::size_t j = 0; j < Q.size(); ++j) axpy(target, W.w[j], coords(chart, Q[j]));
  return inverse(chart, target);
}

Vec mass_vector_residual(const std::vector<Vec>& Qv, const std::vector<Vec>& Rv,
                         const WeightVector& W1, const WeightVector& W2, std::size_t j0) {
  const std::size_t l = Qv.size();
  if (l == 0 || Rv.size() != l || W1.w.size() != l || W2.w.size() != l)
    throw DimensionMismatch("lists must share one nonzero length");
  if (j0 >= l) throw DimensionMismatch("reference index out of range");
  const std::size_t dim = Qv[0].size();

  Vec lhs(dim, 0.0);
  for (std::size_t j = 0; j < l; ++j) {
    axpy(lhs, W2.w[j], Rv[j]);
    axpy(lhs, -W1.w[j], Qv[j]);
  }
  Vec rhs(dim, 0.0);
  for (std::size_t j = 0; j < l; ++j) {
    axpy(rhs, W1.w[j], sub(Rv[j], Qv[j]));
    axpy(rhs, W2.w[j] - W1.w[j], sub(Rv[j], Rv[j0]));
  }
  return sub(lhs, rhs);
}

SegmentDefect almost_equal_defect(const Vec& u_start, const Vec& u_end,
                                  const Vec& v_start, const Vec& v_end) {
  Vec u = sub(u_end, u_start), v = sub(v_end, v_start);
  double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw ZeroVector("segment has zero image length");
  return SegmentDefect{angle_between(u, v), std::abs(1.0 - nu / nv)};
}

double angle_consistency_defect(const FiniteMetricSpace& space, CurvatureBound k,
                                const std::vector<PointId>& refs, PointId x1, PointId y1,
                                PointId x2, PointId y2) {
  double worst = 0.0;
  for (PointId ref : refs) {
    double t1 = comparison_angle(k, space.d(ref, x1), space.d(x1, y1), space.d(ref, y1));
    double t2 = comparison_angle(k, space.d(ref, x2), space.d(x2, y2), space.d(ref, y2));
    worst = std::max(worst, std::abs(t1 - t2));
  }
  return worst;
}

}  // namespace strainmap
