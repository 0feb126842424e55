#include "strainmap/glue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "strainmap/errors.hpp"
#include "strainmap/rng.hpp"

namespace strainmap {

GHDistortion gh_distortion(const GHMap& map) {
  const auto& s = *map.source;
  const auto& t = *map.target;
  if (map.table.size() != s.size())
    throw ValidationError("correspondence table does not cover the source");
  GHDistortion out;
  for (PointId i = 0; i < s.size(); ++i)
    for (PointId j = i + 1; j < s.size(); ++j) {
      double gap = std::abs(t.d(map.table[i], map.table[j]) - s.d(i, j));
      out.nu = std::max(out.nu, gap);
    }
  for (PointId y = 0; y < t.size(); ++y) {
    double best = std::numeric_limits<double>::infinity();
    for (PointId i = 0; i < s.size(); ++i) best = std::min(best, t.d(y, map.table[i]));
    out.covering_defect = std::max(out.covering_defect, best);
  }
  return out;
}

GHMap make_gh_map(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                  std::vector<PointId> table) {
  GHMap map;
  map.source = &source;
  map.target = &target;
  map.table = std::move(table);
  auto q = gh_distortion(map);
  map.nu = q.nu;
  map.covering_defect = q.covering_defect;
  return map;
}

GHMap nearest_point_map(const FiniteMetricSpace& source, const FiniteMetricSpace& target) {
  const auto& ms = source.model;
  const auto& mt = target.model;
  if (ms.kind == ModelKind::none || ms.kind != mt.kind)
    throw IncompatibleModels("both spaces need coordinates of the same model");
  if (ms.params.size() != mt.params.size())
    throw IncompatibleModels("model parameters differ");
  for (std::size_t i = 0; i < ms.params.size(); ++i)
    if (std::abs(ms.params[i] - mt.params[i]) >
        1e-12 * std::max(1.0, std::abs(ms.params[i])))
      throw IncompatibleModels("model parameters differ");

  std::vector<PointId> table(source.size());
  for (PointId i = 0; i < source.size(); ++i) {
    PointId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (PointId j = 0; j < target.size(); ++j) {
      double d = model_point_distance(ms, ms.coords[i], mt.coords[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    table[i] = best;
  }
  return make_gh_map(source, target, std::move(table));
}

Cover select_cover(const FiniteMetricSpace& space, const std::vector<PointId>& strained,
                   double delta, double R, std::uint64_t /*seed*/,
                   const std::vector<char>* eligible) {
  Cover cover;
  const double net_radius = delta * R / 3.0;
  std::vector<char> covered(strained.size(), 0);

  for (;;) {
    std::size_t pick = strained.size();
    for (std::size_t m = 0; m < strained.size(); ++m)
      if (!covered[m] && (!eligible || (*eligible)[m])) {
        pick = m;
        break;
      }
    if (pick == strained.size()) break;
    PointId c = strained[pick];
    cover.centers.push_back(c);
    for (std::size_t m = 0; m < strained.size(); ++m)
      if (!covered[m] && space.d(c, strained[m]) <= net_radius) covered[m] = 1;
  }

  for (std::size_t m = 0; m < strained.size(); ++m)
    if (!covered[m]) cover.uncovered.push_back(strained[m]);

  const double ball = delta * R;
  for (PointId x : strained) {
    std::size_t count = 0;
    for (PointId c : cover.centers)
      if (space.d(x, c) < ball) ++count;
    cover.multiplicity = std::max(cover.multiplicity, count);
  }
  return cover;
}

double weight_value(const FiniteMetricSpace& space, PointId center, double delta,
                    double R, PointId x) {
  double v = 1.0 - 2.0 * space.d(x, center) / (delta * R);
  return v > 0.0 ? v : 0.0;
}

InverseResult local_image(const LocalPair& lp, const FiniteMetricSpace& source, PointId q) {
  return inverse(lp.g_chart, arm_distances(source, lp.f_chart.strainer, q));
}

LocalPair build_local_pair(const FiniteMetricSpace& source,
                           const FiniteMetricSpace& target, const GHMap& h,
                           PointId center, const GlueConfig& cfg) {
  if (!source.curvature_bound || !target.curvature_bound)
    throw ValidationError("both spaces need a curvature bound for strainer searches");
  CurvatureBound k1{*source.curvature_bound}, k2{*target.curvature_bound};

  auto nest = nested_strainers(source, k1, center, cfg.dim, cfg.delta, cfg.R,
                               Rng::derive(cfg.seed, center), cfg.search);
  if (!nest)
    throw StrainerNotFound("no nested strainers at center " + std::to_string(center));

  LocalPair lp;
  lp.center = center;
  lp.nest = std::move(*nest);

  lp.transported.base = h.table[center];
  for (const auto& [a, b] : lp.nest.short_s.pairs)
    lp.transported.pairs.emplace_back(h.table[a], h.table[b]);
  try {
    lp.transported_delta_star = strain_quality(target, k2, lp.transported).delta_star;
  } catch (const Error&) {
    throw TransportQualityFail("carried strainer degenerates at target center " +
                               std::to_string(lp.transported.base));
  }
  if (lp.transported_delta_star >= 2.0 * cfg.delta + cfg.transport_slack)
    throw TransportQualityFail(
        "carried strainer quality " + std::to_string(lp.transported_delta_star) +
        " exceeds " + std::to_string(2.0 * cfg.delta));

  const double ball = cfg.delta * cfg.R;
  lp.f_chart = build_chart(source, lp.nest.short_s, cfg.f_radius_factor * ball);
  lp.g_chart = build_chart(target, lp.transported, cfg.g_radius_factor * ball);
  return lp;
}

GlueContext build_glue_context(const FiniteMetricSpace& source,
                               const FiniteMetricSpace& target, const GHMap& h,
                               const GlueConfig& cfg) {
  if (!source.curvature_bound || !target.curvature_bound)
    throw ValidationError("both spaces need a curvature bound (k line) for gluing");
  if (h.table.size() != source.size())
    throw ValidationError("correspondence table does not cover the source");

  GlueContext ctx;
  ctx.source = &source;
  ctx.target = &target;
  ctx.h = h;
  ctx.config = cfg;
  ctx.k_source = CurvatureBound{*source.curvature_bound};
  ctx.k_target = CurvatureBound{*target.curvature_bound};
  ctx.target_spacing = target.mean_nn_spacing();

  ctx.strained =
      strained_set(source, ctx.k_source, cfg.dim, cfg.delta, cfg.R, cfg.seed, cfg.search);
  if (ctx.strained.empty()) throw ValidationError("the strained set is empty");

  std::vector<PointId> ids(ctx.strained.size());
  for (std::size_t m = 0; m < ctx.strained.size(); ++m) ids[m] = ctx.strained[m].id;

  std::vector<char> eligible(ids.size(), 1);
  std::map<PointId, LocalPair> cache;

  for (;;) {
    ctx.cover = select_cover(source, ids, cfg.delta, cfg.R, cfg.seed, &eligible);
    ctx.pairs.clear();
    bool rebuilt = false;
    for (PointId c : ctx.cover.centers) {
      auto it = cache.find(c);
      if (it != cache.end()) {
        ctx.pairs.push_back(it->second);
        continue;
      }
      try {
        auto lp = build_local_pair(source, target, ctx.h, c, cfg);
        ctx.pairs.push_back(lp);
        cache.emplace(c, std::move(lp));
      } catch (const Error& e) {
        auto pos = std::lower_bound(ids.begin(), ids.end(), c);
        eligible[static_cast<std::size_t>(pos - ids.begin())] = 0;
        ctx.dropped.push_back(DropRecord{c, e.what()});
        rebuilt = true;
        break;
      }
    }
    if (!rebuilt) break;
  }
  return ctx;
}

BlendTrace blend_over(const GlueContext& ctx, PointId z,
                      const std::vector<std::size_t>& center_idx) {
  const auto& cfg = ctx.config;
  BlendTrace tr;
  PointId cur = ctx.h.table[z];
  double sigma = 0.0;

  for (std::size_t idx : center_idx) {
    const LocalPair& lp = ctx.pairs[idx];
    double phi = weight_value(*ctx.source, lp.center, cfg.delta, cfg.R, z);
    if (phi <= 0.0) continue;  // the update is the identity when the weight vanishes
    double sigma_new = sigma + phi;

    auto hj = local_image(lp, *ctx.source, z);
    Vec v = scaled(arm_distances(*ctx.target, lp.transported, cur), sigma / sigma_new);
    axpy(v, phi / sigma_new, coords(lp.g_chart, hj.id));
    auto inv = inverse(lp.g_chart, v);

    double step_residual = std::max(inv.residual, hj.residual);
    tr.max_residual = std::max(tr.max_residual, step_residual);
    tr.steps.push_back(idx);
    tr.values.push_back(inv.id);
    tr.residuals.push_back(step_residual);
    cur = inv.id;
    sigma = sigma_new;
  }
  tr.final_id = cur;
  tr.sigma = sigma;
  return tr;
}

GlueResult glue_run(const GlueContext& ctx) {
  GlueResult res;
  res.config = ctx.config;
  res.nu = ctx.h.nu;
  res.covering_defect = ctx.h.covering_defect;
  res.regime_ok = ctx.h.nu < ctx.config.delta * ctx.config.delta * ctx.config.R;
  res.strained = ctx.strained;
  res.cover = ctx.cover;
  res.dropped = ctx.dropped;
  res.target_spacing = ctx.target_spacing;

  std::vector<std::size_t> all(ctx.pairs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  const double residual_cap = ctx.config.residual_spacing_factor * ctx.target_spacing;
  for (const auto& sp : ctx.strained) {
    auto tr = blend_over(ctx, sp.id, all);
    PointDiagnostics diag;
    diag.z = sp.id;
    diag.hbar = tr.final_id;
    diag.sigma = tr.sigma;
    diag.closeness = ctx.target->d(ctx.h.table[sp.id], tr.final_id);
    diag.max_step_residual = tr.max_residual;
    diag.steps = tr.steps.size();
    diag.sigma_ok = tr.sigma > 1.0 / 3.0;
    diag.residual_ok = tr.max_residual <= residual_cap;
    for (std::size_t s = 0; s < tr.steps.size(); ++s)
      diag.trace.emplace_back(tr.steps[s], tr.values[s]);
    res.points.push_back(std::move(diag));
  }
  return res;
}

GlueResult glue(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                const GHMap& h, const GlueConfig& cfg) {
  const double bound = cfg.delta * cfg.delta * cfg.R;
  if (h.nu >= bound && !cfg.force)
    throw ValidationError("distortion nu=" + std::to_string(h.nu) +
                          " is not below delta^2*R=" + std::to_string(bound) +
                          "; pass force to run anyway");
  auto ctx = build_glue_context(source, target, h, cfg);
  return glue_run(ctx);
}

}  // namespace strainmap
