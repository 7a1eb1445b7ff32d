#include "mcsma/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mcsma {

double RateModel::activation_rate(int node, int channel, double nu_value) const {
    if (homogeneous()) return nu_value;
    return std::pow(nu_value, weights[node][channel - 1]);
}

EdgeSet canonicalize_edges(EdgeSet edges, int num_nodes) {
    for (auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= num_nodes || j >= num_nodes) {
            throw InputError("edge index out of range: (" + std::to_string(i) + "," +
                             std::to_string(j) + ") with num_nodes=" + std::to_string(num_nodes));
        }
        if (i == j) {
            throw InputError("self-loop edge (" + std::to_string(i) + "," + std::to_string(j) +
                             ") is not allowed");
        }
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

static std::vector<std::vector<std::uint64_t>> build_adjacency(
    int num_nodes, const std::vector<EdgeSet>& edge_sets) {
    std::vector<std::vector<std::uint64_t>> adj(edge_sets.size(),
                                                std::vector<std::uint64_t>(num_nodes, 0));
    for (std::size_t c = 0; c < edge_sets.size(); ++c) {
        for (const auto& [i, j] : edge_sets[c]) {
            adj[c][i] |= std::uint64_t{1} << j;
            adj[c][j] |= std::uint64_t{1} << i;
        }
    }
    return adj;
}

MultiChannelNetwork MultiChannelNetwork::create(int num_nodes, int num_channels,
                                                std::vector<EdgeSet> edge_sets, RateModel rates,
                                                bool shared_interference) {
    if (num_nodes < 1) throw InputError("num_nodes must be positive");
    if (num_nodes > 64) throw InputError("num_nodes exceeds the structural limit of 64");
    if (num_channels < 1) throw InputError("num_channels must be positive");
    if (num_channels > 255) throw InputError("num_channels exceeds the structural limit of 255");
    if (static_cast<int>(edge_sets.size()) != num_channels) {
        throw InputError("expected " + std::to_string(num_channels) + " edge sets, got " +
                         std::to_string(edge_sets.size()));
    }
    for (auto& es : edge_sets) es = canonicalize_edges(std::move(es), num_nodes);
    if (shared_interference) {
        for (const auto& es : edge_sets) {
            if (es != edge_sets.front()) {
                throw InputError("shared interference declared but edge sets differ");
            }
        }
    }
    if (rates.nu <= 0) throw InputError("nu must be positive");
    if (rates.kind == RateModel::Kind::HeterogeneousExponents) {
        if (static_cast<int>(rates.weights.size()) != num_nodes) {
            throw InputError("weights must have one row per node");
        }
        for (const auto& row : rates.weights) {
            if (static_cast<int>(row.size()) != num_channels) {
                throw InputError("weights rows must have one entry per channel");
            }
            for (double w : row) {
                if (!std::isfinite(w)) throw InputError("weights must be finite");
            }
        }
    } else if (!rates.weights.empty()) {
        throw InputError("homogeneous rate model must not carry weights");
    }

    MultiChannelNetwork net;
    net.num_nodes = num_nodes;
    net.num_channels = num_channels;
    net.edge_sets = std::move(edge_sets);
    net.rates = std::move(rates);
    net.shared_interference = shared_interference;
    net.adjacency = build_adjacency(num_nodes, net.edge_sets);
    return net;
}

MultiChannelNetwork MultiChannelNetwork::shared(int num_nodes, EdgeSet edges, int num_channels,
                                                RateModel rates) {
    std::vector<EdgeSet> sets(num_channels, edges);
    return create(num_nodes, num_channels, std::move(sets), std::move(rates), true);
}

MultiChannelNetwork MultiChannelNetwork::with_channels(int new_channels) const {
    if (!shared_interference && new_channels != num_channels) {
        throw InputError("channel count can only be changed for shared-interference networks");
    }
    RateModel rm = rates;
    if (rm.kind == RateModel::Kind::HeterogeneousExponents && new_channels != num_channels) {
        throw InputError("channel count can only be changed for homogeneous rate models");
    }
    return create(num_nodes, new_channels, std::vector<EdgeSet>(new_channels, edge_sets.front()),
                  std::move(rm), true);
}

MultiChannelNetwork MultiChannelNetwork::with_nu(double nu) const {
    MultiChannelNetwork net = *this;
    if (nu <= 0) throw InputError("nu must be positive");
    net.rates.nu = nu;
    return net;
}

namespace {

using nlohmann::json;

EdgeSet parse_edge_list(const json& j) {
    if (!j.is_array()) throw InputError("edge list must be an array");
    EdgeSet edges;
    edges.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer()) {
            throw InputError("each edge must be a pair of integer node indices");
        }
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return edges;
}

MultiChannelNetwork parse_network_json(const json& j) {
    if (!j.is_object()) throw InputError("network file must contain a JSON object");
    for (const char* key : {"num_nodes", "num_channels", "edges", "rates"}) {
        if (!j.contains(key)) throw InputError(std::string("missing field: ") + key);
    }
    if (!j["num_nodes"].is_number_integer() || !j["num_channels"].is_number_integer()) {
        throw InputError("num_nodes and num_channels must be integers");
    }
    const int n = j["num_nodes"].get<int>();
    const int c = j["num_channels"].get<int>();
    if (n < 1) throw InputError("num_nodes must be positive");
    if (c < 1) throw InputError("num_channels must be positive");

    const json& edges = j["edges"];
    if (!edges.is_object()) throw InputError("edges must be an object");
    std::vector<EdgeSet> edge_sets;
    bool shared = false;
    if (edges.contains("shared") == edges.contains("per_channel")) {
        throw InputError("edges must contain exactly one of 'shared' or 'per_channel'");
    }
    if (edges.contains("shared")) {
        shared = true;
        edge_sets.assign(c, parse_edge_list(edges["shared"]));
    } else {
        const json& lists = edges["per_channel"];
        if (!lists.is_array() || static_cast<int>(lists.size()) != c) {
            throw InputError("per_channel must list exactly num_channels edge sets");
        }
        for (const auto& l : lists) edge_sets.push_back(parse_edge_list(l));
    }

    const json& rates = j["rates"];
    if (!rates.is_object() || !rates.contains("kind") || !rates.contains("nu")) {
        throw InputError("rates must be an object with 'kind' and 'nu'");
    }
    RateModel rm;
    if (!rates["nu"].is_number()) throw InputError("nu must be a number");
    rm.nu = rates["nu"].get<double>();
    const std::string kind = rates["kind"].get<std::string>();
    if (kind == "homogeneous") {
        rm.kind = RateModel::Kind::Homogeneous;
        if (rates.contains("weights")) throw InputError("homogeneous rates must not have weights");
    } else if (kind == "heterogeneous_exponents") {
        rm.kind = RateModel::Kind::HeterogeneousExponents;
        if (!rates.contains("weights")) {
            throw InputError("heterogeneous_exponents rates require weights");
        }
        for (const auto& row : rates["weights"]) {
            rm.weights.push_back(row.get<std::vector<double>>());
        }
    } else {
        throw InputError("unknown rate kind: " + kind);
    }

    return MultiChannelNetwork::create(n, c, std::move(edge_sets), std::move(rm), shared);
}

}  // namespace

MultiChannelNetwork parse_network_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError("invalid JSON");
    return parse_network_json(j);
}

MultiChannelNetwork parse_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open network file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_network_text(buf.str());
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

}  // namespace mcsma
