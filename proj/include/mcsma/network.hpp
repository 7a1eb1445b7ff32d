#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mcsma/errors.hpp"

namespace mcsma {

// Undirected edge, stored canonically with first < second.
using Edge = std::pair<int, int>;

// Canonical edge set: sorted, duplicate-free, first < second per edge.
using EdgeSet = std::vector<Edge>;

// Sorts, deduplicates and validates an edge list over nodes 0..n-1.
// Throws InputError on out-of-range indices or self-loops.
EdgeSet canonicalize_edges(EdgeSet edges, int num_nodes);

// Activation/deactivation rate structure shared by all modules.
//
// Homogeneous: every node activates on every channel at rate nu,
// deactivates at rate 1 (mu is normalized to 1 throughout).
// HeterogeneousExponents: node i activates on channel c at rate
// nu^{w[i][c-1]}; the weights also define the weighted activity
// landscape used by the asymptotic analysis.
struct RateModel {
    enum class Kind { Homogeneous, HeterogeneousExponents };

    Kind kind = Kind::Homogeneous;
    double nu = 1.0;
    std::vector<std::vector<double>> weights;  // N rows, C columns; empty when homogeneous

    bool homogeneous() const { return kind == Kind::Homogeneous; }

    // Activity-landscape exponent of (node, channel); 1 for the homogeneous model.
    double weight(int node, int channel) const {
        return homogeneous() ? 1.0 : weights[node][channel - 1];
    }

    // Activation rate of `node` on `channel` (1-based) at scale parameter nu_value.
    double activation_rate(int node, int channel, double nu_value) const;
};

// A multi-channel random-access network: N nodes, C channels, one
// conflict edge set per channel, and a rate model. Node adjacency is
// mirrored into per-channel bitmasks (hence N <= 64 structurally).
struct MultiChannelNetwork {
    int num_nodes = 0;
    int num_channels = 0;
    std::vector<EdgeSet> edge_sets;  // size C, canonical
    RateModel rates;
    bool shared_interference = false;  // input declared one edge set for all channels

    // adjacency[c-1][i] = bitmask of conflict-graph neighbors of i on channel c
    std::vector<std::vector<std::uint64_t>> adjacency;

    static MultiChannelNetwork create(int num_nodes, int num_channels,
                                      std::vector<EdgeSet> edge_sets, RateModel rates,
                                      bool shared_interference);

    // Convenience: the same conflict graph on all C channels.
    static MultiChannelNetwork shared(int num_nodes, EdgeSet edges, int num_channels,
                                      RateModel rates);

    const EdgeSet& edges(int channel) const { return edge_sets[channel - 1]; }

    std::uint64_t neighbor_mask(int channel, int node) const {
        return adjacency[channel - 1][node];
    }

    bool adjacent(int channel, int i, int j) const {
        return (neighbor_mask(channel, i) >> j) & 1u;
    }

    // Same graph with a different channel count (shared interference only).
    MultiChannelNetwork with_channels(int num_channels) const;

    // Same network with a different scale parameter nu.
    MultiChannelNetwork with_nu(double nu) const;
};

// Reads and validates a network description file (JSON, see README for
// the schema). Throws InputError on I/O failure or schema violations.
MultiChannelNetwork parse_network(const std::string& path);

// Same, from an already-loaded JSON document encoded as text.
MultiChannelNetwork parse_network_text(const std::string& text);

}  // namespace mcsma
