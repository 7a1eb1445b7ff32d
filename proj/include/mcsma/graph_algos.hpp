#pragma once

#include <cstdint>
#include <vector>

#include "mcsma/network.hpp"

namespace mcsma {

// Default hard cap on the node count of the exact graph searches below.
inline constexpr int kDefaultNodeCap = 32;

// Neighbor bitmasks for a single undirected graph on n <= 64 nodes.
std::vector<std::uint64_t> adjacency_masks(const EdgeSet& edges, int n);

// alpha(G): size of a maximum independent set, by exact branch and bound.
// Throws CapExceeded when n exceeds node_cap.
int independence_number(const EdgeSet& edges, int n, int node_cap = kDefaultNodeCap);

// chi(G): chromatic number, by exact backtracking search.
int chromatic_number(const EdgeSet& edges, int n, int node_cap = kDefaultNodeCap);

// C*(G): maximum number of pairwise-disjoint maximum independent sets,
// via enumeration of all maximum independent sets followed by an exact
// set-packing search over them.
int disjoint_mis_count(const EdgeSet& edges, int n, int node_cap = kDefaultNodeCap);

// All maximum independent sets as bitmasks, sorted ascending.
std::vector<std::uint64_t> maximum_independent_sets(const EdgeSet& edges, int n,
                                                    int node_cap = kDefaultNodeCap);

// Number of independent sets of G (the empty set included). Used as an
// independent reference count for state-space enumeration. Throws
// CapExceeded when the running count would exceed count_cap.
std::uint64_t count_independent_sets(const EdgeSet& edges, int n, std::uint64_t count_cap);

}  // namespace mcsma
