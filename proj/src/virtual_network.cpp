#include "mcsma/virtual_network.hpp"

#include <algorithm>

namespace mcsma {

MultiChannelNetwork VirtualGraph::as_single_channel() const {
    RateModel rm;
    rm.nu = origin.rates.nu;
    if (origin.rates.homogeneous()) {
        rm.kind = RateModel::Kind::Homogeneous;
    } else {
        rm.kind = RateModel::Kind::HeterogeneousExponents;
        rm.weights.assign(num_virtual_nodes, std::vector<double>(1, 0.0));
        for (int i = 0; i < origin.num_nodes; ++i) {
            for (int c = 1; c <= origin.num_channels; ++c) {
                rm.weights[virtual_index(i, c, origin.num_channels)][0] =
                    origin.rates.weight(i, c);
            }
        }
    }
    return MultiChannelNetwork::create(num_virtual_nodes, 1, {edges}, std::move(rm), false);
}

VirtualGraph build_virtual(const MultiChannelNetwork& net) {
    const int n = net.num_nodes;
    const int c = net.num_channels;
    VirtualGraph vg;
    vg.num_virtual_nodes = n * c;
    vg.origin = net;

    EdgeSet edges;
    // same node, different channels: the C virtual nodes of each
    // physical node form a clique
    for (int i = 0; i < n; ++i) {
        for (int c1 = 1; c1 <= c; ++c1) {
            for (int c2 = c1 + 1; c2 <= c; ++c2) {
                edges.emplace_back(virtual_index(i, c1, c), virtual_index(i, c2, c));
            }
        }
    }
    // same channel, conflicting nodes
    for (int ch = 1; ch <= c; ++ch) {
        for (const auto& [i, j] : net.edges(ch)) {
            edges.emplace_back(virtual_index(i, ch, c), virtual_index(j, ch, c));
        }
    }
    vg.edges = canonicalize_edges(std::move(edges), vg.num_virtual_nodes);
    return vg;
}

ActivityState to_multichannel(const VirtualGraph& vg, const std::vector<std::uint8_t>& v_state) {
    const int n = vg.origin.num_nodes;
    const int c = vg.origin.num_channels;
    if (static_cast<int>(v_state.size()) != vg.num_virtual_nodes) {
        throw InputError("virtual state has wrong length");
    }
    for (auto b : v_state) {
        if (b > 1) throw InputError("virtual state entries must be 0 or 1");
    }
    for (const auto& [u, v] : vg.edges) {
        if (v_state[u] && v_state[v]) {
            throw InputError("virtual state is not an independent set of G*: virtual nodes " +
                             std::to_string(u) + " and " + std::to_string(v) + " are adjacent");
        }
    }
    ActivityState x(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int ch = 1; ch <= c; ++ch) {
            if (v_state[virtual_index(i, ch, c)]) x[i] = static_cast<std::uint8_t>(ch);
        }
    }
    return x;
}

std::vector<std::uint8_t> from_multichannel(const VirtualGraph& vg, const ActivityState& x) {
    const int n = vg.origin.num_nodes;
    const int c = vg.origin.num_channels;
    if (static_cast<int>(x.size()) != n) throw InputError("activity state has wrong length");
    for (auto v : x) {
        if (v > c) throw InputError("activity state entry exceeds the channel count");
    }
    for (int ch = 1; ch <= c; ++ch) {
        for (const auto& [i, j] : vg.origin.edges(ch)) {
            if (x[i] == ch && x[j] == ch) {
                throw InputError("infeasible activity state: nodes " + std::to_string(i) +
                                 " and " + std::to_string(j) + " share channel " +
                                 std::to_string(ch));
            }
        }
    }
    std::vector<std::uint8_t> v_state(vg.num_virtual_nodes, 0);
    for (int i = 0; i < n; ++i) {
        if (x[i] != 0) v_state[virtual_index(i, x[i], c)] = 1;
    }
    return v_state;
}

EquivalenceReport check_equivalence(const MultiChannelNetwork& net, std::uint64_t state_cap) {
    EquivalenceReport report;
    const VirtualGraph vg = build_virtual(net);

    const StateSpace multi = StateSpace::enumerate(net, state_cap);
    const StateSpace virt = StateSpace::enumerate(vg.as_single_channel(), state_cap);
    report.multichannel_states = multi.size();
    report.virtual_states = virt.size();
    if (multi.size() != virt.size()) {
        report.first_mismatch = "state counts differ: |X_C| = " + std::to_string(multi.size()) +
                                ", |X*| = " + std::to_string(virt.size());
        return report;
    }

    const auto& rates = net.rates;
    std::vector<char> hit(multi.size(), 0);
    std::vector<std::size_t> image(virt.size());
    for (std::size_t s = 0; s < virt.size(); ++s) {
        const ActivityState vstate = virt.state(s);  // 0/1 vector over virtual nodes
        ActivityState mapped;
        try {
            mapped = to_multichannel(vg, vstate);
        } catch (const InputError& e) {
            report.first_mismatch = "virtual state " + std::to_string(s) +
                                    " does not map: " + e.what();
            return report;
        }
        const auto idx = multi.index_of(mapped);
        if (!idx) {
            report.first_mismatch =
                "virtual state " + std::to_string(s) + " maps outside X_C";
            return report;
        }
        if (hit[*idx]) {
            report.first_mismatch = "V is not injective at multichannel state ordinal " +
                                    std::to_string(*idx);
            return report;
        }
        hit[*idx] = 1;
        image[s] = *idx;
    }

    // rates must match edge-by-edge under V
    std::size_t virt_moves = 0, multi_moves = 0;
    for (std::size_t s = 0; s < multi.size(); ++s) multi_moves += multi.transitions(s).size();
    for (std::size_t s = 0; s < virt.size(); ++s) {
        for (const auto& t : virt.transitions(s)) {
            ++virt_moves;
            const int vnode = t.node;
            const int node = vnode / net.num_channels;
            const int channel = vnode % net.num_channels + 1;
            const double v_rate =
                t.activation ? rates.activation_rate(node, channel, rates.nu) : 1.0;
            // locate the mapped transition on the multichannel side
            const std::size_t from = image[s];
            const std::size_t to = image[t.target];
            bool found = false;
            for (const auto& mt : multi.transitions(from)) {
                if (static_cast<std::size_t>(mt.target) != to) continue;
                const double m_rate =
                    mt.activation ? rates.activation_rate(mt.node, mt.channel, rates.nu) : 1.0;
                if (m_rate != v_rate) {
                    report.first_mismatch =
                        "rate mismatch on transition " + std::to_string(s) + " -> " +
                        std::to_string(t.target) + ": virtual " + std::to_string(v_rate) +
                        " vs multichannel " + std::to_string(m_rate);
                    return report;
                }
                found = true;
                break;
            }
            if (!found) {
                report.first_mismatch = "virtual transition " + std::to_string(s) + " -> " +
                                        std::to_string(t.target) +
                                        " has no multichannel counterpart";
                return report;
            }
        }
    }
    if (virt_moves != multi_moves) {
        report.first_mismatch = "transition counts differ: virtual " +
                                std::to_string(virt_moves) + ", multichannel " +
                                std::to_string(multi_moves);
        return report;
    }

    report.pass = true;
    return report;
}

}  // namespace mcsma
