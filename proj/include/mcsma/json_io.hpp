#pragma once

#include "json.hpp"

#include "mcsma/analysis.hpp"
#include "mcsma/simulator.hpp"
#include "mcsma/virtual_network.hpp"

namespace mcsma {

nlohmann::json to_json(const AnalysisReport& report);
nlohmann::json to_json(const StarvationReport& report, int num_nodes);
nlohmann::json to_json(const MixingReport& report);
nlohmann::json to_json(const ExponentFit& fit);
nlohmann::json to_json(const TrajectoryStats& stats);
nlohmann::json to_json(const HittingEstimate& estimate);
nlohmann::json to_json(const EquivalenceReport& report);
nlohmann::json virtual_graph_to_json(const VirtualGraph& vg);

// "1,0,2" -> ActivityState; validates entries against num_channels.
ActivityState parse_state(const std::string& text, int num_nodes, int num_channels);

}  // namespace mcsma
