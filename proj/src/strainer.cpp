#include "strainmap/strainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "strainmap/errors.hpp"
#include "strainmap/rng.hpp"

namespace strainmap {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_at_base(const FiniteMetricSpace& space, CurvatureBound k, PointId p,
                     PointId x, PointId y) {
  return comparison_angle(k, space.d(x, p), space.d(p, y), space.d(x, y));
}

struct SearchState {
  const FiniteMetricSpace& space;
  CurvatureBound k;
  PointId p;
  double delta;
  std::size_t evals = 0;
  std::size_t budget = 0;

  bool spent() const { return evals >= budget; }

  // Comparison angle or -1 when the triangle does not exist.
  double angle(PointId x, PointId y) {
    ++evals;
    try {
      return angle_at_base(space, k, p, x, y);
    } catch (const NoTriangle&) {
      return -1.0;
    } catch (const DegenerateVertex&) {
      return -1.0;
    }
  }

  bool pair_admissible(PointId a, PointId b,
                       const std::vector<std::pair<PointId, PointId>>& chosen) {
    double opp = angle(a, b);
    if (opp <= kPi - delta) return false;
    const double floor_angle = kPi / 2 - delta;
    for (const auto& [pa, pb] : chosen) {
      if (spent()) return false;
      if (angle(a, pa) <= floor_angle) return false;
      if (angle(a, pb) <= floor_angle) return false;
      if (angle(b, pa) <= floor_angle) return false;
      if (angle(b, pb) <= floor_angle) return false;
    }
    return true;
  }
};

// One greedy pass over the candidate order; fills pairs slot by slot with the
// first admissible pair.
std::optional<Strainer> greedy_attempt(SearchState& st, std::size_t n,
                                       const std::vector<PointId>& order) {
  Strainer s;
  s.base = st.p;
  std::vector<char> used(order.size(), 0);
  for (std::size_t slot = 0; slot < n; ++slot) {
    bool found = false;
    for (std::size_t ia = 0; ia < order.size() && !found; ++ia) {
      if (used[ia]) continue;
      for (std::size_t ib = ia + 1; ib < order.size(); ++ib) {
        if (used[ib]) continue;
        if (st.spent()) return std::nullopt;
        if (st.pair_admissible(order[ia], order[ib], s.pairs)) {
          s.pairs.emplace_back(order[ia], order[ib]);
          used[ia] = used[ib] = 1;
          found = true;
          break;
        }
      }
    }
    if (!found) return std::nullopt;
  }
  return s;
}

double min_arm_of(const FiniteMetricSpace& space, const Strainer& s) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : s.pairs)
    m = std::min({m, space.d(a, s.base), space.d(b, s.base)});
  return s.pairs.empty() ? 0.0 : m;
}

}  // namespace

StrainQuality strain_quality(const FiniteMetricSpace& space, CurvatureBound k,
                             const Strainer& s) {
  StrainQuality q;
  q.delta_star = 0.0;
  q.min_arm = min_arm_of(space, s);
  const std::size_t n = s.n();

  auto update = [&](double shortfall, const std::string& name) {
    if (shortfall > q.delta_star) {
      q.delta_star = shortfall;
      q.worst_constraint = name;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto& [ai, bi] = s.pairs[i];
    update(kPi - angle_at_base(space, k, s.base, ai, bi),
           "opp(" + std::to_string(i + 1) + ")");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& [ai, bi] = s.pairs[i];
      const auto& [aj, bj] = s.pairs[j];
      const std::string ij = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      if (i < j) {
        update(kPi / 2 - angle_at_base(space, k, s.base, ai, aj), "aa" + ij);
        update(kPi / 2 - angle_at_base(space, k, s.base, bi, bj), "bb" + ij);
      }
      update(kPi / 2 - angle_at_base(space, k, s.base, ai, bj), "ab" + ij);
    }
  return q;
}

double rlong_radius(const FiniteMetricSpace& space, const Strainer& s, double delta) {
  return delta * min_arm_of(space, s);
}

std::optional<Strainer> find_strainer(const FiniteMetricSpace& space, CurvatureBound k,
                                      PointId p, std::size_t n, double delta,
                                      const std::vector<PointId>* pool,
                                      std::uint64_t seed, const SearchConfig& cfg) {
  if (n < 1 || delta <= 0) return std::nullopt;

  std::vector<PointId> candidates;
  if (pool) {
    for (PointId q : *pool)
      if (q != p) candidates.push_back(q);
  } else {
    for (PointId q = 0; q < space.size(); ++q)
      if (q != p) candidates.push_back(q);
  }
  if (candidates.size() < 2 * n) return std::nullopt;

  // Longest arms first; ties by id for determinism.
  std::sort(candidates.begin(), candidates.end(), [&](PointId x, PointId y) {
    double dx = space.d(x, p), dy = space.d(y, p);
    if (dx != dy) return dx > dy;
    return x < y;
  });

  SearchState st{space, k, p, delta, 0, cfg.budget};
  std::optional<Strainer> best;
  double best_arm = -1.0;

  auto offer = [&](std::optional<Strainer>&& s) {
    if (!s) return;
    double arm = min_arm_of(space, *s);
    if (arm > best_arm) {
      best_arm = arm;
      best = std::move(s);
    }
  };

  offer(greedy_attempt(st, n, candidates));
  if (!best) {
    Rng rng(seed);
    std::vector<PointId> order = candidates;
    for (std::size_t r = 0; r < cfg.restarts && !st.spent() && !best; ++r) {
      rng.shuffle(order);
      offer(greedy_attempt(st, n, order));
    }
  }

  if (!best) return std::nullopt;
  if (strain_quality(space, k, *best).delta_star >= delta) return std::nullopt;
  return best;
}

std::optional<NestedStrainers> nested_strainers(const FiniteMetricSpace& space,
                                                CurvatureBound k, PointId p,
                                                std::size_t n, double delta, double R,
                                                std::uint64_t seed,
                                                const SearchConfig& cfg) {
  if (delta <= 0 || R <= 0) return std::nullopt;

  std::vector<PointId> long_pool;
  for (PointId q = 0; q < space.size(); ++q)
    if (q != p && space.d(q, p) > R / delta) long_pool.push_back(q);
  auto long_s = find_strainer(space, k, p, n, delta, &long_pool, seed, cfg);
  if (!long_s) return std::nullopt;

  const double min_long = min_arm_of(space, *long_s);
  std::vector<PointId> short_pool;
  for (PointId q = 0; q < space.size(); ++q) {
    double d = space.d(q, p);
    if (q != p && d > R && d < delta * min_long) short_pool.push_back(q);
  }
  auto short_s =
      find_strainer(space, k, p, n, delta, &short_pool, Rng::derive(seed, 1), cfg);
  if (!short_s) return std::nullopt;

  return NestedStrainers{std::move(*long_s), std::move(*short_s)};
}

std::vector<StrainedPoint> strained_set(const FiniteMetricSpace& space, CurvatureBound k,
                                        std::size_t n, double delta, double R,
                                        std::uint64_t seed, const SearchConfig& cfg) {
  std::vector<StrainedPoint> out;
  for (PointId p = 0; p < space.size(); ++p) {
    // The witness search never sees R, so larger R only filters the result.
    auto s = find_strainer(space, k, p, n, delta, nullptr, Rng::derive(seed, p), cfg);
    if (!s) continue;
    double rl = rlong_radius(space, *s, delta);
    if (rl > R) {
      auto q = strain_quality(space, k, *s);
      out.push_back(StrainedPoint{p, std::move(*s), q.delta_star, rl});
    }
  }
  return out;
}

}  // namespace strainmap
