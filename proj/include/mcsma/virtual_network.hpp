#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcsma/state_space.hpp"

namespace mcsma {

// Index of virtual node (i, c) in G*, c 1-based.
inline int virtual_index(int node, int channel, int num_channels) {
    return node * num_channels + (channel - 1);
}

// Single-channel conflict graph on node-channel pairs whose independent
// sets are in bijection with the multi-channel activity states:
// (i,c) ~ (i',c') iff (i = i' and c != c') or (c = c' and (i,i') in E_c).
struct VirtualGraph {
    int num_virtual_nodes = 0;  // C * N
    EdgeSet edges;              // canonical, over virtual indices
    MultiChannelNetwork origin;

    // The virtual network as a single-channel MultiChannelNetwork whose
    // virtual node (i,c) activates at the source rate nu_{i,c}.
    MultiChannelNetwork as_single_channel() const;
};

VirtualGraph build_virtual(const MultiChannelNetwork& net);

// V: 0/1 virtual state -> multi-channel state. Throws InputError when
// the input is not an independent set of G*.
ActivityState to_multichannel(const VirtualGraph& vg, const std::vector<std::uint8_t>& v_state);

// Inverse of to_multichannel. Throws InputError on infeasible input.
std::vector<std::uint8_t> from_multichannel(const VirtualGraph& vg, const ActivityState& x);

struct EquivalenceReport {
    bool pass = false;
    std::size_t multichannel_states = 0;
    std::size_t virtual_states = 0;
    std::string first_mismatch;  // empty when pass
};

// Verifies |X*| = |X_C|, that V is a bijection, and that transition
// rates agree edge-by-edge under V.
EquivalenceReport check_equivalence(const MultiChannelNetwork& net,
                                    std::uint64_t state_cap = kDefaultStateCap);

}  // namespace mcsma
