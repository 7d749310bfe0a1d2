#pragma once

#include "folia/graph.hpp"
#include "folia/holonomy.hpp"
#include "folia/runner.hpp"

#include <string>

namespace folia {

/// Shortest round-trip decimal ("%.17g"); "inf"/"nan" for non-finite values.
std::string format_number(double x);

/// check,sample_index,loc_0..loc_k,residual; parts follow their parent.
std::string report_csv(const CheckReport& report);

std::string summary_text(const ScenarioResult& result);
std::string summary_json(const ScenarioResult& result);

/// Rows of (disk point, image point) plus the exact linear part if known.
std::string holonomy_map_json(const HolonomyMap& map);
std::string graph_point_json(const HolonomyGraph& graph, const GraphPoint& z);
std::string leaf_structure_json(const LeafStructure& leaf);

}  // namespace folia
