#include "strainmap/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "strainmap/errors.hpp"
#include "strainmap/json_writer.hpp"

namespace strainmap {

namespace {

void write_strainer(JsonWriter& w, const Strainer& s) {
  w.begin_object();
  w.kv("base", s.base);
  w.key("pairs").begin_array();
  for (const auto& [a, b] : s.pairs) {
    w.begin_array();
    w.value(a);
    w.value(b);
    w.end_array();
  }
  w.end_array();
  w.end_object();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string strained_report_json(double k, std::size_t n, double delta, double R,
                                 std::uint64_t seed, const SearchConfig& search,
                                 const std::vector<StrainedPoint>& points) {
  JsonWriter w;
  w.begin_object();
  w.kv("version", "1");
  w.kv("k", k);
  w.kv("n", n);
  w.kv("delta", delta);
  w.kv("R", R);
  w.kv("seed", seed);
  w.kv("budget", search.budget);
  w.kv("restarts", search.restarts);
  w.kv("count", points.size());
  w.key("points").begin_array();
  for (const auto& p : points) {
    w.begin_object();
    w.kv("id", p.id);
    w.kv("delta_star", p.delta_star);
    w.kv("rlong_radius", p.rlong);
    w.key("witness");
    write_strainer(w, p.witness);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::string chart_json(const Chart& chart, const DistortionStats& stats) {
  JsonWriter w;
  w.begin_object();
  w.kv("version", "1");
  w.kv("base", chart.base);
  w.kv("radius", chart.radius);
  w.key("strainer");
  write_strainer(w, chart.strainer);
  w.key("domain").begin_array();
  for (PointId q : chart.domain) w.value(q);
  w.end_array();
  w.key("image").begin_array();
  for (const auto& v : chart.image) {
    w.begin_array();
    for (double x : v) w.value(x);
    w.end_array();
  }
  w.end_array();
  w.key("distortion").begin_object();
  w.kv("max", stats.max_defect);
  w.kv("mean", stats.mean_defect);
  w.kv("pair_count", stats.pair_count);
  w.kv("subsampled", stats.subsampled);
  w.key("worst_pair").begin_array();
  w.value(stats.worst_x);
  w.value(stats.worst_y);
  w.end_array();
  w.end_object();
  w.end_object();
  return w.str();
}

std::string glue_result_json(const GlueResult& result,
                             const std::vector<PointId>& h_table) {
  JsonWriter w;
  w.begin_object();
  w.kv("version", "1");

  w.key("config").begin_object();
  w.kv("delta", result.config.delta);
  w.kv("R", result.config.R);
  w.kv("dim", result.config.dim);
  w.kv("seed", result.config.seed);
  w.kv("budget", result.config.search.budget);
  w.kv("restarts", result.config.search.restarts);
  w.kv("transport_slack", result.config.transport_slack);
  w.kv("residual_spacing_factor", result.config.residual_spacing_factor);
  w.kv("f_radius_factor", result.config.f_radius_factor);
  w.kv("g_radius_factor", result.config.g_radius_factor);
  w.kv("force", result.config.force);
  w.end_object();

  w.kv("nu", result.nu);
  w.kv("covering_defect", result.covering_defect);
  w.kv("regime_ok", result.regime_ok);
  w.kv("target_spacing", result.target_spacing);

  w.key("map").begin_array();
  for (PointId t : h_table) w.value(t);
  w.end_array();

  w.key("strained").begin_array();
  for (const auto& p : result.strained) {
    w.begin_object();
    w.kv("id", p.id);
    w.kv("delta_star", p.delta_star);
    w.kv("rlong_radius", p.rlong);
    w.key("witness");
    write_strainer(w, p.witness);
    w.end_object();
  }
  w.end_array();

  w.key("cover").begin_object();
  w.key("centers").begin_array();
  for (PointId c : result.cover.centers) w.value(c);
  w.end_array();
  w.kv("multiplicity", result.cover.multiplicity);
  w.key("uncovered").begin_array();
  for (PointId u : result.cover.uncovered) w.value(u);
  w.end_array();
  w.end_object();

  w.key("dropped").begin_array();
  for (const auto& d : result.dropped) {
    w.begin_object();
    w.kv("center", d.center);
    w.kv("reason", d.reason);
    w.end_object();
  }
  w.end_array();

  w.key("points").begin_array();
  for (const auto& p : result.points) {
    w.begin_object();
    w.kv("z", p.z);
    w.kv("hbar", p.hbar);
    w.kv("sigma", p.sigma);
    w.kv("closeness", p.closeness);
    w.kv("max_step_residual", p.max_step_residual);
    w.kv("steps", p.steps);
    w.kv("sigma_ok", p.sigma_ok);
    w.kv("residual_ok", p.residual_ok);
    w.key("trace").begin_array();
    for (const auto& [j, id] : p.trace) {
      w.begin_array();
      w.value(j);
      w.value(id);
      w.end_array();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();

  w.end_object();
  return w.str();
}

std::string glue_result_csv(const GlueResult& result) {
  std::ostringstream out;
  out << "z,hbar,sigma,closeness,max_step_residual,steps,sigma_ok,residual_ok\n";
  for (const auto& p : result.points)
    out << p.z << ',' << p.hbar << ',' << fmt17(p.sigma) << ',' << fmt17(p.closeness)
        << ',' << fmt17(p.max_step_residual) << ',' << p.steps << ','
        << (p.sigma_ok ? 1 : 0) << ',' << (p.residual_ok ? 1 : 0) << "\n";
  return out.str();
}

GlueResultFile load_glue_result(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid glue result: ") + e.what(), 0);
  }
  GlueResultFile out;
  try {
    const auto& c = j.at("config");
    out.config.delta = c.at("delta").get<double>();
    out.config.R = c.at("R").get<double>();
    out.config.dim = c.at("dim").get<std::size_t>();
    out.config.seed = c.at("seed").get<std::uint64_t>();
    out.config.search.budget = c.at("budget").get<std::size_t>();
    out.config.search.restarts = c.at("restarts").get<std::size_t>();
    out.config.transport_slack = c.at("transport_slack").get<double>();
    out.config.residual_spacing_factor = c.at("residual_spacing_factor").get<double>();
    out.config.f_radius_factor = c.at("f_radius_factor").get<double>();
    out.config.g_radius_factor = c.at("g_radius_factor").get<double>();
    out.config.force = c.at("force").get<bool>();
    out.nu = j.at("nu").get<double>();
    out.table = j.at("map").get<std::vector<PointId>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("glue result misses fields: ") + e.what(), 0);
  }
  return out;
}

void save_map_file(const std::string& path, const std::vector<PointId>& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.size(); ++i)
    out << i << ' ' << table[i] << "\n";
  write_file_atomic(path, out.str());
}

std::vector<PointId> load_map_file(const std::string& path, std::size_t source_size,
                                   std::size_t target_size) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::vector<PointId> table(source_size, static_cast<PointId>(-1));
  std::string line;
  long ln = 0;
  while (std::getline(f, line)) {
    ++ln;
    if (line.empty()) continue;
    std::istringstream in(line);
    long long i = -1, t = -1;
    if (!(in >> i >> t)) throw ParseError("expected 'source target'", ln);
    if (i < 0 || static_cast<std::size_t>(i) >= source_size)
      throw ParseError("source id out of range", ln);
    if (t < 0 || static_cast<std::size_t>(t) >= target_size)
      throw ParseError("target id out of range", ln);
    table[static_cast<std::size_t>(i)] = static_cast<PointId>(t);
  }
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i] == static_cast<PointId>(-1))
      throw ValidationError("map file leaves source point " + std::to_string(i) +
                            " unassigned");
  return table;
}

}  // namespace strainmap
