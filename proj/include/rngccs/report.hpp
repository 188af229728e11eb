#pragma once

#include <filesystem>

#include "rngccs/milp.hpp"

namespace rngccs {

struct ReportBundle {
  std::filesystem::path solution_csv;
  std::filesystem::path ledger_csv;
  std::filesystem::path network_geojson;
  std::filesystem::path map_svg;
  std::filesystem::path bars_svg;
};

// Writes all report artifacts atomically. Pure function of (solution,
// instance): no timestamps, byte-identical on regeneration. The solution
// must pass the independent feasibility check and reference only entities
// present in the instance.
ReportBundle emit_reports(const NetworkSolution& solution,
                          const NetworkInstance& instance,
                          const std::filesystem::path& outdir);

// Round-trips the solution table written by emit_reports.
void write_solution_csv(const NetworkSolution& solution,
                        const std::filesystem::path& file);
NetworkSolution read_solution_csv(const std::filesystem::path& file);

}  // namespace rngccs
