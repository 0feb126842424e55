#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "strainmap/chart.hpp"
#include "strainmap/errors.hpp"
#include "strainmap/glue.hpp"
#include "strainmap/json_writer.hpp"
#include "strainmap/mspace.hpp"
#include "strainmap/report_io.hpp"
#include "strainmap/rng.hpp"
#include "strainmap/strainer.hpp"
#include "strainmap/verify.hpp"

namespace {

using namespace strainmap;

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CurvatureBound space_bound(const FiniteMetricSpace& space,
                           const std::optional<double>& override_k) {
  if (override_k) return CurvatureBound{*override_k};
  if (!space.curvature_bound)
    throw ValidationError("space file has no curvature bound (k none); pass --k");
  return CurvatureBound{*space.curvature_bound};
}

// ---- sample ----------------------------------------------------------------

struct SampleArgs {
  double radius = 1.0, l1 = 1.0, l2 = 1.0;
  std::vector<double> dims;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_sample(const std::string& model, const SampleArgs& a) {
  FiniteMetricSpace space;
  if (model == "sphere")
    space = sample_sphere(a.radius, a.n, a.seed);
  else if (model == "flat_torus")
    space = sample_flat_torus(a.l1, a.l2, a.n, a.seed);
  else
    space = sample_euclid_box(a.dims.empty() ? std::vector<double>{1.0, 1.0} : a.dims,
                              a.n, a.seed);
  save(space, a.out);
  std::printf("wrote %s: %s, N=%zu, diameter=%s\n", a.out.c_str(), model.c_str(),
              space.size(), fmt(space.diameter()).c_str());
}

// ---- validate --------------------------------------------------------------

int run_validate(const std::string& path, std::optional<double> tol) {
  auto space = load(path, std::numeric_limits<double>::infinity());
  auto rep = validate(space, tol);
  std::printf("N=%zu diameter=%s\n", space.size(), fmt(space.diameter()).c_str());
  std::printf("worst triangle defect: %s (points %zu %zu %zu)\n",
              fmt(rep.worst_triangle_defect).c_str(), rep.worst_triangle[0],
              rep.worst_triangle[1], rep.worst_triangle[2]);
  std::printf("worst symmetry defect: %s\n", fmt(rep.worst_symmetry_defect).c_str());
  std::printf("worst diagonal: %s\n", fmt(rep.worst_diagonal).c_str());
  std::printf("min off-diagonal: %s\n", fmt(rep.min_offdiagonal).c_str());
  std::printf("tolerance: %s -> %s\n", fmt(rep.tolerance).c_str(),
              rep.valid ? "valid" : "INVALID");
  return rep.valid ? 0 : kExitValidation;
}

// ---- strain ----------------------------------------------------------------

struct StrainArgs {
  std::string space_path, out;
  std::size_t n = 2;
  double delta = 0.2, R = 0.4;
  std::uint64_t seed = 1;
  std::optional<double> k;
  SearchConfig search;
};

void run_strain(const StrainArgs& a) {
  auto space = load(a.space_path);
  auto k = space_bound(space, a.k);
  auto set = strained_set(space, k, a.n, a.delta, a.R, a.seed, a.search);
  write_file_atomic(a.out, strained_report_json(k.k, a.n, a.delta, a.R, a.seed,
                                                a.search, set));
  std::printf("strained set: %zu of %zu points -> %s\n", set.size(), space.size(),
              a.out.c_str());
}

// ---- chart -----------------------------------------------------------------

struct ChartArgs {
  std::string space_path, out;
  PointId base = 0;
  std::size_t n = 2;
  double delta = 0.2, radius = 0.1;
  std::uint64_t seed = 1;
  std::optional<double> k;
  SearchConfig search;
};

int run_chart(const ChartArgs& a) {
  auto space = load(a.space_path);
  auto k = space_bound(space, a.k);
  if (a.base >= space.size()) throw ValidationError("base id out of range");
  auto s = find_strainer(space, k, a.base, a.n, a.delta, nullptr, a.seed, a.search);
  if (!s) {
    std::printf("no (%zu, %s)-strainer found at point %zu within the budget\n", a.n,
                fmt(a.delta).c_str(), a.base);
    return kExitValidation;
  }
  auto chart = build_chart(space, *s, a.radius);
  DistortionStats stats;
  if (chart.domain.size() >= 2) stats = distortion(chart);
  write_file_atomic(a.out, chart_json(chart, stats));
  std::printf("chart at %zu: %zu domain points, distortion max=%s mean=%s -> %s\n",
              a.base, chart.domain.size(), fmt(stats.max_defect).c_str(),
              fmt(stats.mean_defect).c_str(), a.out.c_str());
  return 0;
}

// ---- glue ------------------------------------------------------------------

struct GlueArgs {
  std::string source_path, target_path, map_spec = "auto", out_prefix;
  GlueConfig cfg;
};

int run_glue(const GlueArgs& a) {
  auto source = load(a.source_path);
  auto target = load(a.target_path);

  GHMap h;
  if (a.map_spec == "auto")
    h = nearest_point_map(source, target);
  else
    h = make_gh_map(source, target,
                    load_map_file(a.map_spec, source.size(), target.size()));

  const double bound = a.cfg.delta * a.cfg.delta * a.cfg.R;
  std::printf("nu=%s covering_defect=%s regime bound delta^2*R=%s -> %s\n",
              fmt(h.nu).c_str(), fmt(h.covering_defect).c_str(), fmt(bound).c_str(),
              h.nu < bound ? "inside regime" : "OUTSIDE regime");
  if (h.nu >= bound && !a.cfg.force) {
    std::printf("refusing to glue outside the regime; pass --force to override\n");
    return kExitValidation;
  }

  auto ctx = build_glue_context(source, target, h, a.cfg);
  auto result = glue_run(ctx);

  write_file_atomic(a.out_prefix + ".json", glue_result_json(result, h.table));
  write_file_atomic(a.out_prefix + ".csv", glue_result_csv(result));

  double min_sigma = std::numeric_limits<double>::infinity(), max_close = 0;
  std::size_t sigma_bad = 0;
  for (const auto& p : result.points) {
    min_sigma = std::min(min_sigma, p.sigma);
    max_close = std::max(max_close, p.closeness);
    if (!p.sigma_ok) ++sigma_bad;
  }
  std::printf("strained=%zu centers=%zu dropped=%zu multiplicity=%zu\n",
              result.strained.size(), result.cover.centers.size(),
              result.dropped.size(), result.cover.multiplicity);
  std::printf("min sigma=%s (%zu below 1/3), max closeness=%s -> %s.json/.csv\n",
              fmt(min_sigma).c_str(), sigma_bad, fmt(max_close).c_str(),
              a.out_prefix.c_str());
  return 0;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string result_path, source_path, target_path, out_prefix;
  double band_lo = 0.2, band_hi = 1.0;
  std::size_t pairs = 100;
  std::uint64_t seed = 1;
  double defect_threshold = 0.15;
  double claim_threshold = 0.15;
};

int run_verify(const VerifyArgs& a) {
  auto source = load(a.source_path);
  auto target = load(a.target_path);
  auto file = load_glue_result(a.result_path);
  auto h = make_gh_map(source, target, file.table);
  auto ctx = build_glue_context(source, target, h, file.config);
  auto result = glue_run(ctx);

  auto rep = distance_report(result, source, target, a.band_lo, a.band_hi);

  // sampled pairs for the sequence comparison
  struct PairRow {
    PointId y, z;
    double dyz;
    ClaimReport claims;
  };
  std::vector<PairRow> rows;
  Rng rng(a.seed);
  std::size_t guard = 0;
  while (rows.size() < a.pairs && guard++ < 50 * a.pairs && result.strained.size() > 1) {
    PointId y = result.strained[rng.below(result.strained.size())].id;
    PointId z = result.strained[rng.below(result.strained.size())].id;
    if (y == z) continue;
    rows.push_back(PairRow{y, z, source.d(y, z), claim_sequences(ctx, y, z)});
  }

  double worst_direct = 0, worst_recursive = 0;
  for (const auto& r : rows) {
    worst_direct = std::max(worst_direct, r.claims.direct_defect);
    worst_recursive = std::max(worst_recursive, r.claims.recursive_defect);
  }

  std::ostringstream md;
  md << "# distance preservation report\n\n";
  md << "source `" << a.source_path << "`, target `" << a.target_path << "`, result `"
     << a.result_path << "`\n\n";
  md << "nu = " << fmt(result.nu) << ", regime bound delta^2*R = "
     << fmt(file.config.delta * file.config.delta * file.config.R)
     << ", regime_ok = " << (result.regime_ok ? "yes" : "no") << "\n\n";
  md << "band [" << fmt(a.band_lo) << ", " << fmt(a.band_hi) << "], case split at "
     << fmt(rep.split) << "\n\n";
  md << "| slice | pairs | max defect | mean defect | threshold | verdict |\n";
  md << "|---|---|---|---|---|---|\n";
  auto row = [&](const char* name, const BandStats& st) {
    md << "| " << name << " | " << st.pair_count << " | " << fmt(st.max_defect)
       << " | " << fmt(st.mean_defect) << " | " << fmt(a.defect_threshold) << " | "
       << (st.pair_count == 0 ? "empty"
                              : (st.max_defect <= a.defect_threshold ? "pass" : "fail"))
       << " |\n";
  };
  row("overall", rep.overall);
  row("below split", rep.below_split);
  row("above split", rep.above_split);
  md << "\nsequence comparison on " << rows.size() << " sampled pairs: worst direct "
     << fmt(worst_direct) << ", worst recursive " << fmt(worst_recursive)
     << ", threshold " << fmt(a.claim_threshold) << "\n";

  std::ostringstream csv;
  csv << "y,z,dyz,n2,direct_defect,recursive_defect\n";
  for (const auto& r : rows)
    csv << r.y << ',' << r.z << ',' << fmt(r.dyz) << ',' << r.claims.n2 << ','
        << fmt(r.claims.direct_defect) << ',' << fmt(r.claims.recursive_defect) << "\n";

  write_file_atomic(a.out_prefix + ".md", md.str());
  write_file_atomic(a.out_prefix + ".csv", csv.str());
  std::printf("band pairs=%zu max_defect=%s mean=%s; claims worst=(%s, %s) -> %s.md/.csv\n",
              rep.overall.pair_count, fmt(rep.overall.max_defect).c_str(),
              fmt(rep.overall.mean_defect).c_str(), fmt(worst_direct).c_str(),
              fmt(worst_recursive).c_str(), a.out_prefix.c_str());
  return 0;
}

// ---- counterexample --------------------------------------------------------

struct CounterexampleArgs {
  std::string out_prefix = "counterexample";
  std::string control = "none";  // none | equal_weights | lemma_pass
  double pitch = 0.02;
};

struct GridRig {
  FiniteMetricSpace space;
  Chart chart;
  double pitch;
  std::size_t per_side;
  PointId at(double x, double y) const {
    auto ix = static_cast<std::size_t>(std::llround(x / pitch));
    auto iy = static_cast<std::size_t>(std::llround(y / pitch));
    return ix * per_side + iy;
  }
};

GridRig make_grid_rig(double pitch) {
  const auto per_side = static_cast<std::size_t>(std::llround(1.0 / pitch)) + 1;
  std::vector<std::vector<double>> pts;
  pts.reserve(per_side * per_side + 4);
  for (std::size_t ix = 0; ix < per_side; ++ix)
    for (std::size_t iy = 0; iy < per_side; ++iy) pts.push_back({ix * pitch, iy * pitch});
  const double arm = 100.0, c = 0.5;
  const std::size_t base_arm = pts.size();
  pts.push_back({c - arm, c});
  pts.push_back({c + arm, c});
  pts.push_back({c, c - arm});
  pts.push_back({c, c + arm});
  GridRig rig{euclid_space_from_coords(pts), Chart{}, pitch, per_side};
  Strainer s{rig.at(0.5, 0.5), {{base_arm, base_arm + 1}, {base_arm + 2, base_arm + 3}}};
  rig.chart = build_chart(rig.space, s, 2.0);
  return rig;
}

int run_counterexample(const CounterexampleArgs& a) {
  auto rig = make_grid_rig(a.pitch);
  JsonWriter w;
  w.begin_object();
  w.kv("version", "1");
  w.kv("control", a.control);

  if (a.control == "equal_weights") {
    std::vector<PointId> Q{rig.at(0.2, 0.2), rig.at(0.7, 0.24), rig.at(0.4, 0.74)};
    WeightVector W{{0.5, 0.3, 0.2}};
    auto rep = com_weight_counterexample(rig.chart, Q, W, W);
    std::printf("equal-weights control: com distance %s; %s\n",
                fmt(rep.com_distance).c_str(), rep.verdict.c_str());
    w.kv("com_distance", rep.com_distance);
    w.kv("verdict", rep.verdict);
  } else if (a.control == "lemma_pass") {
    std::vector<PointId> Q{rig.at(0.20, 0.20), rig.at(0.26, 0.20), rig.at(0.20, 0.26)};
    std::vector<PointId> R{rig.at(0.26, 0.28), rig.at(0.32, 0.28), rig.at(0.26, 0.34)};
    const double third = 1.0 / 3.0;
    WeightVector W1{{third, third, third}};
    WeightVector W2{{third + 0.003, third - 0.003, third}};
    auto rep = com_transport_check(rig.chart, CurvatureBound{0}, Q, R, W1, W2);
    std::printf("weight-condition control: lhs=%s vs min_qr=%s; ratio defect=%s, "
                "angle defect=%s\n",
                fmt(rep.weight_lhs).c_str(), fmt(rep.min_qr).c_str(),
                fmt(rep.max_ratio_defect).c_str(), fmt(rep.max_angle_defect).c_str());
    w.kv("weight_lhs", rep.weight_lhs);
    w.kv("min_qr", rep.min_qr);
    w.kv("max_ratio_defect", rep.max_ratio_defect);
    w.kv("max_angle_defect", rep.max_angle_defect);
  } else {
    std::vector<PointId> Q{rig.at(0.2, 0.2), rig.at(0.7, 0.24), rig.at(0.4, 0.74)};
    WeightVector W1{{0.5, 0.3, 0.2}}, W2{{0.3, 0.5, 0.2}};
    auto rep = com_weight_counterexample(rig.chart, Q, W1, W2);
    auto lemma = com_transport_check(rig.chart, CurvatureBound{0}, Q, Q, W1, W2);
    std::printf("com distance %s, min segment length %s, image prediction %s\n",
                fmt(rep.com_distance).c_str(), fmt(rep.min_qr).c_str(),
                fmt(rep.image_prediction).c_str());
    std::printf("%s\n", rep.verdict.c_str());
    std::printf("weight condition lhs=%s vs min_qr=%s (hypothesis %s)\n",
                fmt(lemma.weight_lhs).c_str(), fmt(lemma.min_qr).c_str(),
                lemma.weight_lhs < lemma.min_qr ? "satisfied" : "violated");
    w.kv("com_distance", rep.com_distance);
    w.kv("min_qr", rep.min_qr);
    w.kv("image_prediction", rep.image_prediction);
    w.kv("residual_q", rep.residual_q);
    w.kv("residual_r", rep.residual_r);
    w.kv("counterexample", rep.counterexample);
    w.kv("verdict", rep.verdict);
    w.kv("weight_lhs", lemma.weight_lhs);
  }
  w.end_object();
  write_file_atomic(a.out_prefix + ".json", w.str());
  std::printf("wrote %s.json\n", a.out_prefix.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strainer coordinate charts and center-of-mass gluing on finite "
               "metric samples"};
  app.require_subcommand(1);
  app.set_config("--config");

  // sample
  auto* sample = app.add_subcommand("sample", "draw a model-space sample");
  sample->require_subcommand(1);
  SampleArgs sa;
  auto add_common_sample = [&](CLI::App* cmd) {
    cmd->add_option("--n", sa.n, "number of points")->required();
    cmd->add_option("--seed", sa.seed, "RNG seed")->required();
    cmd->add_option("--out", sa.out, "output space file")->required();
  };
  auto* sphere = sample->add_subcommand("sphere", "uniform points on a round sphere");
  sphere->add_option("--radius", sa.radius, "sphere radius");
  add_common_sample(sphere);
  auto* torus = sample->add_subcommand("flat_torus", "uniform points on a flat torus");
  torus->add_option("--L1", sa.l1, "first period");
  torus->add_option("--L2", sa.l2, "second period");
  add_common_sample(torus);
  auto* box = sample->add_subcommand("euclid_box", "uniform points in a box");
  box->add_option("--dims", sa.dims, "box edge lengths")->delimiter(',');
  add_common_sample(box);

  // validate
  auto* val = app.add_subcommand("validate", "check a space file is a metric");
  std::string val_path;
  double val_tol = -1;
  val->add_option("file", val_path, "space file")->required();
  val->add_option("--tol", val_tol, "override validation tolerance");

  // strain
  auto* strain = app.add_subcommand("strain", "extract the strained set");
  StrainArgs sta;
  double sta_k = std::numeric_limits<double>::quiet_NaN();
  strain->add_option("file", sta.space_path, "space file")->required();
  strain->add_option("--n", sta.n, "pairs per strainer");
  strain->add_option("--delta,--delta_rad", sta.delta, "strainer tolerance");
  strain->add_option("--R,--R_len", sta.R, "length scale");
  strain->add_option("--seed", sta.seed, "search seed");
  strain->add_option("--k", sta_k, "override curvature bound");
  strain->add_option("--budget", sta.search.budget, "angle evaluations per point");
  strain->add_option("--out", sta.out, "output JSON")->required();

  // chart
  auto* chart_cmd = app.add_subcommand("chart", "build a strainer chart at a point");
  ChartArgs ca;
  double ca_k = std::numeric_limits<double>::quiet_NaN();
  chart_cmd->add_option("file", ca.space_path, "space file")->required();
  chart_cmd->add_option("--base", ca.base, "base point id")->required();
  chart_cmd->add_option("--n", ca.n, "pairs per strainer");
  chart_cmd->add_option("--delta,--delta_rad", ca.delta, "strainer tolerance");
  chart_cmd->add_option("--radius", ca.radius, "chart ball radius")->required();
  chart_cmd->add_option("--seed", ca.seed, "search seed");
  chart_cmd->add_option("--k", ca_k, "override curvature bound");
  chart_cmd->add_option("--budget", ca.search.budget, "angle evaluations");
  chart_cmd->add_option("--out", ca.out, "output JSON")->required();

  // glue
  auto* glue_cmd = app.add_subcommand("glue", "blend local charts along a correspondence");
  GlueArgs ga;
  glue_cmd->add_option("--source", ga.source_path, "source space file")->required();
  glue_cmd->add_option("--target", ga.target_path, "target space file")->required();
  glue_cmd->add_option("--map", ga.map_spec, "map file or 'auto'");
  glue_cmd->add_option("--delta,--delta_rad", ga.cfg.delta, "strainer tolerance");
  glue_cmd->add_option("--R,--R_len", ga.cfg.R, "length scale");
  glue_cmd->add_option("--n,--dim", ga.cfg.dim, "dimension (pairs per strainer)");
  glue_cmd->add_option("--seed", ga.cfg.seed, "search seed");
  glue_cmd->add_option("--budget", ga.cfg.search.budget, "angle evaluations per point");
  glue_cmd->add_flag("--force", ga.cfg.force, "run outside the distortion regime");
  glue_cmd->add_option("--out", ga.out_prefix, "output prefix")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "measure distance preservation");
  VerifyArgs va;
  verify_cmd->add_option("--result", va.result_path, "glue result JSON")->required();
  verify_cmd->add_option("--source", va.source_path, "source space file")->required();
  verify_cmd->add_option("--target", va.target_path, "target space file")->required();
  verify_cmd->add_option("--band-lo", va.band_lo, "band lower edge");
  verify_cmd->add_option("--band-hi", va.band_hi, "band upper edge");
  verify_cmd->add_option("--pairs", va.pairs, "sampled pairs for sequence checks");
  verify_cmd->add_option("--seed", va.seed, "pair sampling seed");
  verify_cmd->add_option("--defect-threshold", va.defect_threshold,
                         "distance defect threshold");
  verify_cmd->add_option("--claim-threshold", va.claim_threshold,
                         "sequence defect threshold");
  verify_cmd->add_option("--out", va.out_prefix, "output prefix")->required();

  // counterexample
  auto* ce_cmd = app.add_subcommand(
      "counterexample", "center-of-mass weight-shift counterexample and controls");
  CounterexampleArgs cea;
  ce_cmd->add_option("--out", cea.out_prefix, "output prefix");
  ce_cmd->add_option("--control", cea.control, "none | equal_weights | lemma_pass")
      ->check(CLI::IsMember({"none", "equal_weights", "lemma_pass"}));
  ce_cmd->add_option("--pitch", cea.pitch, "grid pitch");

  try {
    app.parse(argc, argv);

    if (sphere->parsed()) return run_sample("sphere", sa), 0;
    if (torus->parsed()) return run_sample("flat_torus", sa), 0;
    if (box->parsed()) return run_sample("euclid_box", sa), 0;
    if (val->parsed())
      return run_validate(val_path, val_tol < 0 ? std::optional<double>{}
                                                : std::optional<double>{val_tol});
    if (strain->parsed()) {
      if (!std::isnan(sta_k)) sta.k = sta_k;
      return run_strain(sta), 0;
    }
    if (chart_cmd->parsed()) {
      if (!std::isnan(ca_k)) ca.k = ca_k;
      return run_chart(ca);
    }
    if (glue_cmd->parsed()) return run_glue(ga);
    if (verify_cmd->parsed()) return run_verify(va);
    if (ce_cmd->parsed()) return run_counterexample(cea);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? 0 : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const IncompatibleModels& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const Error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}
