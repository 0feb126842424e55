#include "strainmap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "strainmap/errors.hpp"

namespace strainmap {

DistortionReport distance_report(const GlueResult& result,
                                 const FiniteMetricSpace& source,
                                 const FiniteMetricSpace& target, double band_lo,
                                 double band_hi) {
  if (!(band_lo >= 0.0) || !(band_hi > band_lo))
    throw std::invalid_argument("band bounds must satisfy 0 <= lo < hi");
  if (result.points.size() < 2)
    throw std::invalid_argument("need at least two glued points");

  DistortionReport rep;
  rep.band_lo = band_lo;
  rep.band_hi = band_hi;
  rep.split = result.config.R * std::pow(result.config.delta, 1.5);

  auto record = [](BandStats& st, double defect, PointId y, PointId z) {
    st.mean_defect += defect;
    ++st.pair_count;
    if (defect > st.max_defect) {
      st.max_defect = defect;
      st.worst_y = y;
      st.worst_z = z;
    }
  };

  const auto& pts = result.points;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      double dyz = source.d(pts[a].z, pts[b].z);
      if (dyz < band_lo || dyz > band_hi || dyz == 0.0) continue;
      double defect = std::abs(1.0 - target.d(pts[a].hbar, pts[b].hbar) / dyz);
      record(rep.overall, defect, pts[a].z, pts[b].z);
      if (dyz < rep.split)
        record(rep.below_split, defect, pts[a].z, pts[b].z);
      else
        record(rep.above_split, defect, pts[a].z, pts[b].z);
    }

  for (BandStats* st : {&rep.overall, &rep.below_split, &rep.above_split})
    if (st->pair_count) st->mean_defect /= static_cast<double>(st->pair_count);
  rep.empty = rep.overall.pair_count == 0;
  return rep;
}

ClaimReport claim_sequences(const GlueContext& ctx, PointId y, PointId z) {
  if (y == z) throw std::invalid_argument("the pair must be two distinct points");
  const auto& cfg = ctx.config;
  const double dyz = ctx.source->d(y, z);

  ClaimReport rep;
  for (std::size_t j = 0; j < ctx.pairs.size(); ++j) {
    double wy = weight_value(*ctx.source, ctx.pairs[j].center, cfg.delta, cfg.R, y);
    double wz = weight_value(*ctx.source, ctx.pairs[j].center, cfg.delta, cfg.R, z);
    if (wy + wz > 0.0) rep.live.push_back(j);
  }
  rep.n2 = rep.live.size();

  // recursive blend restricted to the live centers (identical to the full
  // recursion, which skips zero-weight centers)
  auto tr_y = blend_over(ctx, y, rep.live);
  auto tr_z = blend_over(ctx, z, rep.live);
  rep.y_final = tr_y.final_id;
  rep.z_final = tr_z.final_id;
  rep.max_inverse_residual = std::max(tr_y.max_residual, tr_z.max_residual);

  // direct blend: center of mass of the local images in the current chart
  auto direct_at = [&](PointId w, std::size_t upto,
                       double& sigma_out) -> std::optional<InverseResult> {
    const LocalPair& lp = ctx.pairs[rep.live[upto]];
    double sigma = 0.0;
    Vec v(lp.transported.n(), 0.0);
    for (std::size_t l = 0; l <= upto; ++l) {
      double w_l =
          weight_value(*ctx.source, ctx.pairs[rep.live[l]].center, cfg.delta, cfg.R, w);
      if (w_l <= 0.0) continue;
      auto h_l = local_image(ctx.pairs[rep.live[l]], *ctx.source, w);
      axpy(v, w_l, arm_distances(*ctx.target, lp.transported, h_l.id));
      sigma += w_l;
    }
    sigma_out = sigma;
    if (sigma <= 0.0) return std::nullopt;
    auto inv = inverse(lp.g_chart, scaled(v, 1.0 / sigma));
    rep.max_inverse_residual = std::max(rep.max_inverse_residual, inv.residual);
    return inv;
  };

  // walk the recursion alongside the direct blend to collect the gap vectors
  std::size_t step_y = 0, step_z = 0;
  PointId cur_y = ctx.h.table[y], cur_z = ctx.h.table[z];
  for (std::size_t m = 0; m < rep.live.size(); ++m) {
    std::size_t idx = rep.live[m];
    while (step_y < tr_y.steps.size() && tr_y.steps[step_y] <= idx)
      cur_y = tr_y.values[step_y++];
    while (step_z < tr_z.steps.size() && tr_z.steps[step_z] <= idx)
      cur_z = tr_z.values[step_z++];

    double sy = 0, sz = 0;
    auto ybar = direct_at(y, m, sy);
    auto zbar = direct_at(z, m, sz);
    if (ybar) rep.ybar_trace.push_back(ybar->id);
    if (zbar) rep.zbar_trace.push_back(zbar->id);
    if (ybar && zbar) {
      const LocalPair& lp = ctx.pairs[idx];
      Vec gy = arm_distances(*ctx.target, lp.transported, cur_y);
      Vec gz = arm_distances(*ctx.target, lp.transported, cur_z);
      Vec gyb = arm_distances(*ctx.target, lp.transported, ybar->id);
      Vec gzb = arm_distances(*ctx.target, lp.transported, zbar->id);
      rep.alpha_mags.push_back(norm(sub(sub(gy, gz), sub(gyb, gzb))));
    }
    if (m + 1 == rep.live.size() && ybar && zbar) {
      rep.ybar_final = ybar->id;
      rep.zbar_final = zbar->id;
      double direct_len = ctx.target->d(ybar->id, zbar->id);
      rep.direct_defect = std::abs(direct_len - dyz) / dyz;
      double rec_len = ctx.target->d(tr_y.final_id, tr_z.final_id);
      rep.recursive_defect = std::abs(rec_len - direct_len) / dyz;
    }
  }

  if (rep.live.empty()) {
    // no weight anywhere: both constructions degenerate to the correspondence
    rep.ybar_final = ctx.h.table[y];
    rep.zbar_final = ctx.h.table[z];
    double len = ctx.target->d(rep.ybar_final, rep.zbar_final);
    rep.direct_defect = std::abs(len - dyz) / dyz;
    rep.recursive_defect = 0.0;
  }
  return rep;
}

ComCounterexampleReport com_weight_counterexample(const Chart& chart,
                                                  const std::vector<PointId>& Q,
                                                  const WeightVector& W1,
                                                  const WeightVector& W2) {
  if (Q.size() < 2) throw std::invalid_argument("need at least two points");
  ComCounterexampleReport rep;
  rep.min_qr = 0.0;  // the second list is Q itself

  Vec shift(chart.strainer.n(), 0.0);
  for (std::size_t j = 0; j < Q.size(); ++j)
    axpy(shift, W2.w[j] - W1.w[j], coords(chart, Q[j]));
  rep.image_prediction = norm(shift);

  auto com1 = center_of_mass(chart, Q, W1);
  auto com2 = center_of_mass(chart, Q, W2);
  rep.com_q = com1.id;
  rep.com_r = com2.id;
  rep.residual_q = com1.residual;
  rep.residual_r = com2.residual;
  rep.com_distance = chart.space->d(com1.id, com2.id);

  if (W1.w == W2.w) {
    rep.verdict = "no counterexample: equal weights give one center of mass";
  } else if (rep.com_distance > 0.0) {
    rep.counterexample = true;
    rep.verdict =
        "counterexample: every sampled segment has length zero yet the centers of "
        "mass separate, so the segment/center length ratio 0 over positive breaks "
        "any ratio bound";
  } else {
    rep.verdict = "unresolved at sample resolution: both centers snapped to one point";
  }
  return rep;
}

ComTransportReport com_transport_check(const Chart& chart, CurvatureBound k,
                                       const std::vector<PointId>& Q,
                                       const std::vector<PointId>& R,
                                       const WeightVector& W1, const WeightVector& W2) {
  if (Q.empty() || Q.size() != R.size())
    throw DimensionMismatch("point lists must share one nonzero length");
  const auto& space = *chart.space;
  const std::size_t l = Q.size();
  const std::size_t n_arms = chart.strainer.n();

  ComTransportReport rep;
  rep.min_qr = std::numeric_limits<double>::infinity();
  double max_qr = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    double d = space.d(Q[j], R[j]);
    rep.min_qr = std::min(rep.min_qr, d);
    max_qr = std::max(max_qr, d);
  }
  rep.length_spread_excess =
      rep.min_qr > 0.0 ? max_qr / rep.min_qr - 1.0
                       : std::numeric_limits<double>::infinity();

  for (std::size_t j = 0; j < l; ++j)
    for (std::size_t jj = 0; jj < l; ++jj)
      rep.max_rr = std::max(rep.max_rr, space.d(R[j], R[jj]));
  for (std::size_t j = 0; j < l; ++j)
    rep.weight_diff_sup = std::max(rep.weight_diff_sup, std::abs(W1.w[j] - W2.w[j]));
  rep.weight_lhs = rep.weight_diff_sup * rep.max_rr;

  auto seg_angle = [&](std::size_t arm, PointId qj, PointId rj) {
    PointId a = chart.strainer.pairs[arm].first;
    return comparison_angle(k, space.d(a, qj), space.d(qj, rj), space.d(a, rj));
  };

  for (std::size_t i = 0; i < n_arms; ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < l; ++j) {
      if (space.d(Q[j], R[j]) == 0.0) continue;
      double ang = seg_angle(i, Q[j], R[j]);
      lo = std::min(lo, ang);
      hi = std::max(hi, ang);
      any = true;
    }
    if (any) rep.angle_spread_max = std::max(rep.angle_spread_max, hi - lo);
  }

  auto com1 = center_of_mass(chart, Q, W1);
  auto com2 = center_of_mass(chart, R, W2);
  rep.com_q = com1.id;
  rep.com_r = com2.id;
  rep.residual_q = com1.residual;
  rep.residual_r = com2.residual;
  rep.com_distance = space.d(com1.id, com2.id);
  rep.zero_segment = rep.com_distance == 0.0;

  rep.angle_defects.assign(n_arms, std::vector<double>());
  for (std::size_t j = 0; j < l; ++j) {
    double dqr = space.d(Q[j], R[j]);
    if (dqr == 0.0 || rep.zero_segment) {
      ++rep.skipped_zero_segments;
      continue;
    }
    rep.ratio_defects.push_back(std::abs(1.0 - dqr / rep.com_distance));
    rep.max_ratio_defect = std::max(rep.max_ratio_defect, rep.ratio_defects.back());
    for (std::size_t i = 0; i < n_arms; ++i) {
      double d = std::abs(seg_angle(i, Q[j], R[j]) -
                          seg_angle(i, rep.com_q, rep.com_r));
      rep.angle_defects[i].push_back(d);
      rep.max_angle_defect = std::max(rep.max_angle_defect, d);
    }
  }
  return rep;
}

LocalAngleSpreadReport local_angle_spread(const GlueContext& ctx, PointId y, PointId z) {
  if (y == z) throw std::invalid_argument("the pair must be two distinct points");
  LocalAngleSpreadReport rep;
  const double fr = ctx.config.f_radius_factor * ctx.config.delta * ctx.config.R;

  std::vector<PointId> img_y, img_z;
  for (std::size_t j = 0; j < ctx.pairs.size(); ++j) {
    if (ctx.source->d(y, ctx.pairs[j].center) > fr) continue;
    if (ctx.source->d(z, ctx.pairs[j].center) > fr) continue;
    auto hy = local_image(ctx.pairs[j], *ctx.source, y);
    auto hz = local_image(ctx.pairs[j], *ctx.source, z);
    if (hy.id == hz.id) {
      ++rep.skipped_degenerate;
      continue;
    }
    rep.live.push_back(j);
    img_y.push_back(hy.id);
    img_z.push_back(hz.id);
  }

  for (std::size_t jj = 0; jj < rep.live.size(); ++jj) {
    const LocalPair& ref = ctx.pairs[rep.live[jj]];
    for (std::size_t i = 0; i < ref.transported.n(); ++i) {
      PointId arm = ref.transported.pairs[i].first;
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t ll = 0; ll < rep.live.size(); ++ll) {
        double ang = comparison_angle(
            ctx.k_target, ctx.target->d(arm, img_y[ll]),
            ctx.target->d(img_y[ll], img_z[ll]), ctx.target->d(arm, img_z[ll]));
        lo = std::min(lo, ang);
        hi = std::max(hi, ang);
      }
      double spread = hi - lo;
      rep.entries.push_back(AngleSpreadEntry{rep.live[jj], i, spread});
      rep.max_spread = std::max(rep.max_spread, spread);
    }
  }
  return rep;
}

}  // namespace strainmap
