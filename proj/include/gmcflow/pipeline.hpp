#pragma once

#include "gmcflow/config.hpp"
#include "gmcflow/family.hpp"

#include <string>

namespace gmcflow {

// Shipped deterministic data: a fixed smooth vector field on the y-grid.
std::array<GridField, 3> reference_data(const TorusGrid& y_grid);

// Deterministic target selection for the duality check (y != z by
// construction, addressed from the run seed).
std::vector<McTarget> pick_targets(const RunConfig& cfg, int count);

// Full chain: field synthesis, GMC statistics, family solve, inversion,
// assembly and Monte Carlo verification. Writes tensors, reports and a
// checksum manifest under cfg.output_dir.
// Returns 0 on success, 1 if a verification item fails, 3 on numerical
// failure (including artifact checksum mismatches).
int run_pipeline(const RunConfig& cfg);

// Re-verifies the manifest checksums in an output directory and aggregates
// the per-step JSON reports into summary.json. Same exit conventions.
int aggregate_report(const std::string& output_dir);

// Minimal structural JSON-schema check (type / required / properties) used
// for every report this tool emits.
bool validate_against_schema(const std::string& json_text, const std::string& schema_text,
                             std::string& error);

// The schema shipped for summary documents.
std::string summary_schema();

}  // namespace gmcflow
