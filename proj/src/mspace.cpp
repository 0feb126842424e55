#include "strainmap/mspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "strainmap/errors.hpp"
#include "strainmap/rng.hpp"

namespace strainmap {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double sphere_angle(const double* u, const double* v) {
  // atan2 form; u, v are unit vectors.
  double cx = u[1] * v[2] - u[2] * v[1];
  double cy = u[2] * v[0] - u[0] * v[2];
  double cz = u[0] * v[1] - u[1] * v[0];
  double sine = std::sqrt(cx * cx + cy * cy + cz * cz);
  double cosine = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  return std::atan2(sine, cosine);
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::sphere: return "sphere";
    case ModelKind::flat_torus: return "flat_torus";
    case ModelKind::euclid_box: return "euclid_box";
    default: return "none";
  }
}

double model_point_distance(const ModelInfo& m, const std::vector<double>& a,
                            const std::vector<double>& b) {
  switch (m.kind) {
    case ModelKind::sphere: {
      const double r = m.params.at(0);
      double ua[3] = {a[0] / r, a[1] / r, a[2] / r};
      double ub[3] = {b[0] / r, b[1] / r, b[2] / r};
      return r * sphere_angle(ua, ub);
    }
    case ModelKind::flat_torus: {
      const double l1 = m.params.at(0), l2 = m.params.at(1);
      double best = std::numeric_limits<double>::infinity();
      for (int sx = -1; sx <= 1; ++sx)
        for (int sy = -1; sy <= 1; ++sy) {
          double dx = a[0] - b[0] + sx * l1;
          double dy = a[1] - b[1] + sy * l2;
          best = std::min(best, std::sqrt(dx * dx + dy * dy));
        }
      return best;
    }
    case ModelKind::euclid_box: {
      double s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    default:
      throw IncompatibleModels("space carries no model coordinates");
  }
}

FiniteMetricSpace::FiniteMetricSpace(std::size_t n, std::vector<double> dist_matrix)
    : n_(n), dist_(std::move(dist_matrix)) {
  if (dist_.size() != n_ * n_)
    throw ValidationError("distance matrix size does not match point count");
}

double FiniteMetricSpace::diameter() const {
  double m = 0;
  for (double v : dist_) m = std::max(m, v);
  return m;
}

double FiniteMetricSpace::mean_nn_spacing() const {
  if (n_ < 2) return 0.0;
  double acc = 0;
  for (PointId i = 0; i < n_; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (PointId j = 0; j < n_; ++j)
      if (j != i) best = std::min(best, d(i, j));
    acc += best;
  }
  return acc / static_cast<double>(n_);
}

namespace {

FiniteMetricSpace from_model(ModelInfo model, std::optional<double> k_bound) {
  const std::size_t n = model.coords.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = model_point_distance(model, model.coords[i], model.coords[j]);
      dist[i * n + j] = v;
      dist[j * n + i] = v;
    }
  FiniteMetricSpace space(n, std::move(dist));
  space.model = std::move(model);
  space.curvature_bound = k_bound;
  return space;
}

}  // namespace

FiniteMetricSpace sample_sphere(double radius, std::size_t n, std::uint64_t seed) {
  if (radius <= 0) throw std::invalid_argument("sphere radius must be positive");
  if (n < 2) throw std::invalid_argument("need at least two points");
  Rng rng(seed);
  ModelInfo model;
  model.kind = ModelKind::sphere;
  model.params = {radius};
  model.coords.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = rng.uniform(-1.0, 1.0);
    double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    model.coords.push_back({radius * (s * std::cos(phi)), radius * (s * std::sin(phi)),
                            radius * z});
  }
  return from_model(std::move(model), 1.0 / (radius * radius));
}

FiniteMetricSpace sample_flat_torus(double l1, double l2, std::size_t n,
                                    std::uint64_t seed) {
  if (l1 <= 0 || l2 <= 0) throw std::invalid_argument("torus sides must be positive");
  if (n < 2) throw std::invalid_argument("need at least two points");
  Rng rng(seed);
  ModelInfo model;
  model.kind = ModelKind::flat_torus;
  model.params = {l1, l2};
  model.coords.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    model.coords.push_back({rng.uniform(0.0, l1), rng.uniform(0.0, l2)});
  return from_model(std::move(model), 0.0);
}

FiniteMetricSpace sample_euclid_box(const std::vector<double>& dims, std::size_t n,
                                    std::uint64_t seed) {
  if (dims.empty()) throw std::invalid_argument("box needs at least one dimension");
  for (double d : dims)
    if (d <= 0) throw std::invalid_argument("box dimensions must be positive");
  if (n < 2) throw std::invalid_argument("need at least two points");
  Rng rng(seed);
  ModelInfo model;
  model.kind = ModelKind::euclid_box;
  model.params = dims;
  model.coords.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> c(dims.size());
    for (std::size_t d = 0; d < dims.size(); ++d) c[d] = rng.uniform(0.0, dims[d]);
    model.coords.push_back(std::move(c));
  }
  return from_model(std::move(model), 0.0);
}

FiniteMetricSpace sphere_space_from_units(double radius,
                                          const std::vector<std::array<double, 3>>& units) {
  ModelInfo model;
  model.kind = ModelKind::sphere;
  model.params = {radius};
  for (const auto& u : units)
    model.coords.push_back({radius * u[0], radius * u[1], radius * u[2]});
  return from_model(std::move(model), 1.0 / (radius * radius));
}

FiniteMetricSpace torus_space_from_coords(double l1, double l2,
                                          const std::vector<std::vector<double>>& coords) {
  ModelInfo model;
  model.kind = ModelKind::flat_torus;
  model.params = {l1, l2};
  model.coords = coords;
  return from_model(std::move(model), 0.0);
}

FiniteMetricSpace euclid_space_from_coords(const std::vector<std::vector<double>>& coords) {
  ModelInfo model;
  model.kind = ModelKind::euclid_box;
  std::size_t dim = coords.empty() ? 0 : coords[0].size();
  model.params.assign(dim, 1.0);
  model.coords = coords;
  return from_model(std::move(model), 0.0);
}

ValidationReport validate(const FiniteMetricSpace& space, std::optional<double> tol) {
  const std::size_t n = space.size();
  ValidationReport rep;
  rep.tolerance = tol.value_or(1e-9 * space.diameter());
  rep.min_offdiagonal = n > 1 ? std::numeric_limits<double>::infinity() : 0.0;

  for (PointId i = 0; i < n; ++i) {
    double diag = std::abs(space.d(i, i));
    if (diag > rep.worst_diagonal) rep.worst_diagonal = diag;
  }
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j) {
      double s = std::abs(space.d(i, j) - space.d(j, i));
      if (s > rep.worst_symmetry_defect) {
        rep.worst_symmetry_defect = s;
        rep.worst_symmetry[0] = i;
        rep.worst_symmetry[1] = j;
      }
      rep.min_offdiagonal = std::min(rep.min_offdiagonal, space.d(i, j));
    }

  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j) {
      const double dij = space.d(i, j);
      for (PointId k = j + 1; k < n; ++k) {
        const double dik = space.d(i, k), djk = space.d(j, k);
        double defect = std::max({dij - dik - djk, dik - dij - djk, djk - dij - dik});
        if (defect > rep.worst_triangle_defect) {
          rep.worst_triangle_defect = defect;
          rep.worst_triangle[0] = i;
          rep.worst_triangle[1] = j;
          rep.worst_triangle[2] = k;
        }
      }
    }

  rep.valid = rep.worst_triangle_defect <= rep.tolerance &&
              rep.worst_symmetry_defect <= rep.tolerance &&
              rep.worst_diagonal <= rep.tolerance &&
              (n < 2 || rep.min_offdiagonal > 0.0);
  return rep;
}

void metric_closure(FiniteMetricSpace& space) {
  const std::size_t n = space.size();
  for (PointId k = 0; k < n; ++k)
    for (PointId i = 0; i < n; ++i) {
      const double dik = space.d(i, k);
      for (PointId j = 0; j < n; ++j) {
        double via = dik + space.d(k, j);
        if (via < space.d(i, j)) space.set_d(i, j, via);
      }
    }
}

FiniteMetricSpace perturb_metric(const FiniteMetricSpace& space, double amplitude,
                                 std::uint64_t seed) {
  if (amplitude < 0 || amplitude >= 0.5)
    throw std::invalid_argument("perturbation amplitude must lie in [0, 0.5)");
  FiniteMetricSpace out = space;
  if (amplitude == 0.0) return out;
  Rng rng(seed);
  const std::size_t n = space.size();
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j) {
      double factor = 1.0 + amplitude * rng.uniform(-1.0, 1.0);
      out.set_d(i, j, space.d(i, j) * factor);
    }
  metric_closure(out);
  return out;
}

double quadruple_defect(const FiniteMetricSpace& space, CurvatureBound k, PointId a,
                        PointId b, PointId c, PointId d) {
  if (a == b || a == c || a == d || b == c || b == d || c == d)
    throw std::invalid_argument("quadruple points must be distinct");
  double sum = comparison_angle(k, space.d(b, a), space.d(a, c), space.d(b, c)) +
               comparison_angle(k, space.d(b, a), space.d(a, d), space.d(b, d)) +
               comparison_angle(k, space.d(c, a), space.d(a, d), space.d(c, d));
  return 2.0 * std::numbers::pi - sum;
}

CurvatureScan check_curvature_bound(const FiniteMetricSpace& space, CurvatureBound k,
                                    std::size_t trials, std::uint64_t seed) {
  const std::size_t n = space.size();
  CurvatureScan scan;
  scan.min_defect = std::numeric_limits<double>::infinity();
  if (n < 4 || trials == 0) {
    scan.min_defect = 0.0;
    return scan;
  }

  auto consider = [&](PointId a, PointId b, PointId c, PointId d) {
    try {
      double defect = quadruple_defect(space, k, a, b, c, d);
      ++scan.evaluated;
      if (defect < scan.min_defect) {
        scan.min_defect = defect;
        scan.argmin[0] = a;
        scan.argmin[1] = b;
        scan.argmin[2] = c;
        scan.argmin[3] = d;
      }
    } catch (const NoTriangle&) {
      ++scan.skipped_no_triangle;
    }
  };

  const double subsets =
      static_cast<double>(n) * (n - 1) * (n - 2) * (n - 3) / 24.0;
  if (subsets * 4.0 <= static_cast<double>(trials)) {
    for (PointId i = 0; i < n; ++i)
      for (PointId j = i + 1; j < n; ++j)
        for (PointId l = j + 1; l < n; ++l)
          for (PointId m = l + 1; m < n; ++m) {
            consider(i, j, l, m);
            consider(j, i, l, m);
            consider(l, i, j, m);
            consider(m, i, j, l);
          }
  } else {
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
      PointId q[4];
      q[0] = rng.below(n);
      for (int s = 1; s < 4;) {
        PointId cand = rng.below(n);
        bool dup = false;
        for (int u = 0; u < s; ++u) dup |= (q[u] == cand);
        if (!dup) q[s++] = cand;
      }
      consider(q[0], q[1], q[2], q[3]);
    }
  }
  if (scan.evaluated == 0) scan.min_defect = 0.0;
  return scan;
}

void save(const FiniteMetricSpace& space, const std::string& path) {
  std::ostringstream out;
  const std::size_t n = space.size();
  out << "N " << n << "\n";
  if (space.curvature_bound)
    out << "k " << fmt17(*space.curvature_bound) << "\n";
  else
    out << "k none\n";
  for (PointId i = 0; i < n; ++i) {
    for (PointId j = 0; j < n; ++j) {
      if (j) out << ' ';
      out << fmt17(space.d(i, j));
    }
    out << "\n";
  }
  if (space.model.kind != ModelKind::none && space.model.coords.size() == n) {
    out << "# coords " << model_kind_name(space.model.kind);
    for (double p : space.model.params) out << ' ' << fmt17(p);
    out << "\n";
    for (const auto& c : space.model.coords) {
      for (std::size_t d = 0; d < c.size(); ++d) {
        if (d) out << ' ';
        out << fmt17(c[d]);
      }
      out << "\n";
    }
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f << out.str();
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("cannot move " + tmp + " to " + path);
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, long line_no) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError("not a number: '" + tok + "'", line_no);
  return v;
}

}  // namespace

FiniteMetricSpace load(const std::string& path, std::optional<double> validation_tol) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);

  long ln = 0;
  auto next_line = [&]() -> const std::string& {
    if (static_cast<std::size_t>(ln) >= lines.size())
      throw ParseError("unexpected end of file", ln + 1);
    return lines[ln++];
  };

  auto head = split_ws(next_line());
  if (head.size() != 2 || head[0] != "N") throw ParseError("expected 'N <count>'", ln);
  long n_signed = std::strtol(head[1].c_str(), nullptr, 10);
  if (n_signed < 1) throw ParseError("invalid point count", ln);
  const std::size_t n = static_cast<std::size_t>(n_signed);

  auto kline = split_ws(next_line());
  if (kline.size() != 2 || kline[0] != "k") throw ParseError("expected 'k <value|none>'", ln);
  std::optional<double> k_bound;
  if (kline[1] != "none") k_bound = parse_double(kline[1], ln);

  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = split_ws(next_line());
    if (row.size() != n)
      throw ParseError("matrix row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(n),
                       ln);
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = parse_double(row[j], ln);
  }

  FiniteMetricSpace space(n, std::move(dist));
  space.curvature_bound = k_bound;

  // optional coords block
  while (static_cast<std::size_t>(ln) < lines.size() && split_ws(lines[ln]).empty()) ++ln;
  if (static_cast<std::size_t>(ln) < lines.size()) {
    auto header = split_ws(lines[ln]);
    if (header.size() < 2 || header[0] != "#" || header[1] != "coords")
      throw ParseError("expected '# coords' block", ln + 1);
    ++ln;
    ModelInfo model;
    if (header.size() > 2) {
      const std::string& kind = header[2];
      if (kind == "sphere") model.kind = ModelKind::sphere;
      else if (kind == "flat_torus") model.kind = ModelKind::flat_torus;
      else if (kind == "euclid_box") model.kind = ModelKind::euclid_box;
      else throw ParseError("unknown model '" + kind + "'", ln);
      for (std::size_t t = 3; t < header.size(); ++t)
        model.params.push_back(parse_double(header[t], ln));
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto row = split_ws(next_line());
      if (row.empty()) throw ParseError("empty coordinate line", ln);
      std::vector<double> c(row.size());
      for (std::size_t d = 0; d < row.size(); ++d) c[d] = parse_double(row[d], ln);
      model.coords.push_back(std::move(c));
    }
    space.model = std::move(model);
  }

  auto rep = validate(space, validation_tol);
  if (!rep.valid)
    throw ValidationError("loaded matrix is not a metric (triangle defect " +
                          std::to_string(rep.worst_triangle_defect) + ", symmetry defect " +
                          std::to_string(rep.worst_symmetry_defect) + ")");
  return space;
}

}  // namespace strainmap
