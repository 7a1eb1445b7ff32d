#include "mcsma/json_io.hpp"

#include <cmath>
#include <sstream>

namespace mcsma {

using nlohmann::json;

namespace {

json state_to_json(const ActivityState& x) {
    json arr = json::array();
    for (auto v : x) arr.push_back(static_cast<int>(v));
    return arr;
}

// Integral landscape values print as integers in homogeneous reports.
json height(double v, bool weighted) {
    if (!weighted) return static_cast<long long>(std::llround(v));
    return v;
}

}  // namespace

json to_json(const StarvationReport& report, int num_nodes) {
    json per_node = json::array();
    for (int i = 0; i < num_nodes; ++i) {
        switch (report.status[i]) {
            case StarvationReport::NodeStatus::PermanentStarver:
                per_node.push_back("permanent-starver");
                break;
            case StarvationReport::NodeStatus::NeverStarves:
                per_node.push_back("never-starves");
                break;
            case StarvationReport::NodeStatus::Defined:
                per_node.push_back(report.index[i]);
                break;
        }
    }
    json j;
    j["per_node"] = per_node;
    j["network"] = report.network ? json(*report.network) : json(nullptr);
    return j;
}

json to_json(const AnalysisReport& report) {
    json j;
    j["weighted"] = report.weighted;
    j["num_nodes"] = report.num_nodes;
    j["num_channels"] = report.num_channels;
    j["A"] = report.A_C;
    if (report.weighted) j["A_weighted"] = report.A_weighted;
    j["dominant_count"] = report.dominant_count;
    json doms = json::array();
    for (const auto& d : report.dominants) doms.push_back(state_to_json(d));
    j["dominants"] = doms;
    j["theta"] = report.theta ? json(*report.theta) : json(nullptr);
    if (!report.theta_per_node.empty()) j["theta_per_node"] = report.theta_per_node;
    j["jain"] = report.jain ? json(*report.jain) : json(nullptr);
    if (report.heights_skipped) {
        j["heights_skipped"] = true;
        j["delta_matrix"] = json(nullptr);
        j["starvation"] = json(nullptr);
        j["gamma"] = json(nullptr);
        j["conductance_exponent"] = json(nullptr);
        j["nu_grid"] = report.nu_grid;
        return j;
    }
    json delta = json::array();
    for (const auto& row : report.delta_matrix) {
        json r = json::array();
        for (double v : row) r.push_back(height(v, report.weighted));
        delta.push_back(r);
    }
    j["delta_matrix"] = delta;
    j["starvation"] = to_json(report.starvation, report.num_nodes);
    j["gamma"] = report.gamma ? json(height(*report.gamma, report.weighted)) : json(nullptr);
    j["conductance_exponent"] =
        report.conductance_exponent ? json(*report.conductance_exponent) : json(nullptr);
    j["nu_grid"] = report.nu_grid;
    return j;
}

json to_json(const MixingReport& report) {
    json j;
    j["epsilon"] = report.epsilon;
    j["gamma"] = report.gamma_value;
    j["source_dominant"] = report.source_dominant;
    j["target_dominant"] = report.target_dominant;
    j["bottleneck_set_size"] = report.bottleneck_set.size();
    j["complemented"] = report.complemented;
    j["boundary_ok"] = report.boundary_ok;
    j["boundary_level"] = report.boundary_level;
    j["nu_grid"] = report.nu_grid;
    j["flow"] = report.flow;
    j["pi_S"] = report.pi_S;
    j["conductance"] = report.conductance;
    j["lower_bound"] = report.lower_bound;
    j["conductance_exponent"] = report.conductance_exponent;
    j["bound_exponent"] = report.bound_exponent;
    if (!report.gap.empty()) {
        j["spectral_gap"] = report.gap;
        j["relaxation_exponent"] = report.relaxation_exponent;
    }
    return j;
}

json to_json(const ExponentFit& fit) {
    json j;
    j["nu_grid"] = fit.nu_grid;
    j["values"] = fit.values;
    j["log_nu_values"] = fit.log_nu_values;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    return j;
}

json to_json(const TrajectoryStats& stats) {
    json j;
    j["elapsed"] = stats.elapsed;
    j["events"] = stats.events;
    j["node_active_fraction"] = stats.node_active_fraction;
    j["node_channel_fraction"] = stats.node_channel_fraction;
    j["channel_occupancy"] = stats.channel_occupancy;
    if (!stats.state_occupancy.empty()) {
        j["state_occupancy"] = stats.state_occupancy;
        j["state_visits"] = stats.state_visits;
    }
    return j;
}

json to_json(const HittingEstimate& estimate) {
    json j;
    j["mean"] = estimate.mean;
    j["stderr"] = estimate.stderr_;
    j["samples"] = estimate.samples.size();
    j["censored"] = estimate.censored;
    return j;
}

json to_json(const EquivalenceReport& report) {
    json j;
    j["pass"] = report.pass;
    j["multichannel_states"] = report.multichannel_states;
    j["virtual_states"] = report.virtual_states;
    j["first_mismatch"] = report.first_mismatch;
    return j;
}

json virtual_graph_to_json(const VirtualGraph& vg) {
    json edges = json::array();
    for (const auto& [u, v] : vg.edges) edges.push_back(json::array({u, v}));
    json j;
    j["num_virtual_nodes"] = vg.num_virtual_nodes;
    j["source_nodes"] = vg.origin.num_nodes;
    j["source_channels"] = vg.origin.num_channels;
    j["edges"] = edges;
    j["index_rule"] = "virtual node (i,c) has index i*C + (c-1)";
    return j;
}

ActivityState parse_state(const std::string& text, int num_nodes, int num_channels) {
    ActivityState x;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        int v;
        try {
            v = std::stoi(part);
        } catch (const std::exception&) {
            throw InputError("state entries must be integers: '" + part + "'");
        }
        if (v < 0 || v > num_channels) {
            throw InputError("state entry " + std::to_string(v) + " outside 0.." +
                             std::to_string(num_channels));
        }
        x.push_back(static_cast<std::uint8_t>(v));
    }
    if (static_cast<int>(x.size()) != num_nodes) {
        throw InputError("state has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(num_nodes));
    }
    return x;
}

}  // namespace mcsma
