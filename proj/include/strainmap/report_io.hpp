#ifndef STRAINMAP_REPORT_IO_HPP
#define STRAINMAP_REPORT_IO_HPP

#include <string>
#include <vector>

#include "strainmap/chart.hpp"
#include "strainmap/glue.hpp"
#include "strainmap/strainer.hpp"

namespace strainmap {

// Strained-set report: per point the witness pairs, delta_star and the
// R-long radius of the witness.
std::string strained_report_json(double k, std::size_t n, double delta, double R,
                                 std::uint64_t seed, const SearchConfig& search,
                                 const std::vector<StrainedPoint>& points);

std::string chart_json(const Chart& chart, const DistortionStats& stats);

// Full glue output: configuration, correspondence table, witnesses, cover and
// per-point diagnostics. Reloadable.
std::string glue_result_json(const GlueResult& result,
                             const std::vector<PointId>& h_table);

// Per-point CSV summary of the same run.
std::string glue_result_csv(const GlueResult& result);

// The pieces needed to rebuild a glue context deterministically.
struct GlueResultFile {
  GlueConfig config;
  std::vector<PointId> table;
  double nu = 0.0;
};

GlueResultFile load_glue_result(const std::string& path);

// Map file: one "source_id target_id" line per source point.
void save_map_file(const std::string& path, const std::vector<PointId>& table);
std::vector<PointId> load_map_file(const std::string& path, std::size_t source_size,
                                   std::size_t target_size);

}  // namespace strainmap

#endif
