#include "mcsma/graph_algos.hpp"

#include <algorithm>
#include <bit>

namespace mcsma {

namespace {

void check_node_cap(int n, int node_cap, const char* what) {
    if (n > node_cap) {
        throw CapExceeded(std::string(what) + ": graph has " + std::to_string(n) +
                          " nodes, exact search is capped at " + std::to_string(node_cap) +
                          " (raise the cap to override)");
    }
    if (n > 64) throw CapExceeded(std::string(what) + ": more than 64 nodes is unsupported");
}

int popcount(std::uint64_t x) { return std::popcount(x); }

// Branch and bound for the maximum independent set size. `cand` is the
// set of nodes still available, `size` the size of the partial set.
void mis_size_rec(const std::vector<std::uint64_t>& nbr, std::uint64_t cand, int size,
                  int& best) {
    if (size + popcount(cand) <= best) return;
    if (cand == 0) {
        best = std::max(best, size);
        return;
    }
    // branch on a candidate of maximum degree within cand
    int pick = -1, pick_deg = -1;
    for (std::uint64_t m = cand; m;) {
        const int v = std::countr_zero(m);
        m &= m - 1;
        const int deg = popcount(nbr[v] & cand);
        if (deg > pick_deg) {
            pick_deg = deg;
            pick = v;
        }
    }
    const std::uint64_t bit = std::uint64_t{1} << pick;
    mis_size_rec(nbr, cand & ~(nbr[pick] | bit), size + 1, best);  // include
    mis_size_rec(nbr, cand & ~bit, size, best);                    // exclude
}

void mis_enum_rec(const std::vector<std::uint64_t>& nbr, std::uint64_t cand, std::uint64_t cur,
                  int size, int target, std::vector<std::uint64_t>& out) {
    if (size == target) {
        out.push_back(cur);
        return;
    }
    if (size + popcount(cand) < target) return;
    const int v = std::countr_zero(cand);
    const std::uint64_t bit = std::uint64_t{1} << v;
    mis_enum_rec(nbr, cand & ~(nbr[v] | bit), cur | bit, size + 1, target, out);
    mis_enum_rec(nbr, cand & ~bit, cur, size, target, out);
}

bool color_rec(const std::vector<std::uint64_t>& nbr, const std::vector<int>& order,
               std::vector<int>& color, std::size_t pos, int used, int k) {
    if (pos == order.size()) return true;
    const int v = order[pos];
    for (int c = 1; c <= std::min(used + 1, k); ++c) {
        bool ok = true;
        for (std::uint64_t m = nbr[v]; m;) {
            const int u = std::countr_zero(m);
            m &= m - 1;
            if (color[u] == c) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        color[v] = c;
        if (color_rec(nbr, order, color, pos + 1, std::max(used, c), k)) return true;
        color[v] = 0;
    }
    return false;
}

void packing_rec(const std::vector<std::uint64_t>& sets, std::size_t from, std::uint64_t used,
                 int count, int set_size, int n, int& best) {
    best = std::max(best, count);
    const int slack = (n - popcount(used)) / set_size;
    if (count + slack <= best) return;
    for (std::size_t i = from; i < sets.size(); ++i) {
        if (sets[i] & used) continue;
        packing_rec(sets, i + 1, used | sets[i], count + 1, set_size, n, best);
    }
}

void count_rec(const std::vector<std::uint64_t>& nbr, std::uint64_t cand, std::uint64_t& count,
               std::uint64_t cap) {
    // I(G) = I(G - v) + I(G - N[v]); leaves are exactly the independent sets
    if (cand == 0) {
        if (++count > cap) {
            throw CapExceeded("independent-set count exceeds cap " + std::to_string(cap));
        }
        return;
    }
    const int v = std::countr_zero(cand);
    const std::uint64_t bit = std::uint64_t{1} << v;
    count_rec(nbr, cand & ~(nbr[v] | bit), count, cap);  // v in the set
    count_rec(nbr, cand & ~bit, count, cap);             // v not in the set
}

}  // namespace

std::vector<std::uint64_t> adjacency_masks(const EdgeSet& edges, int n) {
    std::vector<std::uint64_t> nbr(n, 0);
    for (const auto& [i, j] : edges) {
        nbr[i] |= std::uint64_t{1} << j;
        nbr[j] |= std::uint64_t{1} << i;
    }
    return nbr;
}

int independence_number(const EdgeSet& edges, int n, int node_cap) {
    check_node_cap(n, node_cap, "independence_number");
    const auto nbr = adjacency_masks(edges, n);
    const std::uint64_t all = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    int best = 0;
    mis_size_rec(nbr, all, 0, best);
    return best;
}

std::vector<std::uint64_t> maximum_independent_sets(const EdgeSet& edges, int n, int node_cap) {
    check_node_cap(n, node_cap, "maximum_independent_sets");
    const int alpha = independence_number(edges, n, node_cap);
    const auto nbr = adjacency_masks(edges, n);
    const std::uint64_t all = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    std::vector<std::uint64_t> out;
    mis_enum_rec(nbr, all, 0, 0, alpha, out);
    std::sort(out.begin(), out.end());
    return out;
}

int chromatic_number(const EdgeSet& edges, int n, int node_cap) {
    check_node_cap(n, node_cap, "chromatic_number");
    if (edges.empty()) return 1;
    const auto nbr = adjacency_masks(edges, n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return popcount(nbr[a]) > popcount(nbr[b]); });
    std::vector<int> color(n, 0);
    for (int k = 2; k <= n; ++k) {
        std::fill(color.begin(), color.end(), 0);
        if (color_rec(nbr, order, color, 0, 0, k)) return k;
    }
    return n;
}

int disjoint_mis_count(const EdgeSet& edges, int n, int node_cap) {
    check_node_cap(n, node_cap, "disjoint_mis_count");
    const auto sets = maximum_independent_sets(edges, n, node_cap);
    const int alpha = popcount(sets.front());
    int best = 0;
    packing_rec(sets, 0, 0, 0, alpha, n, best);
    return best;
}

std::uint64_t count_independent_sets(const EdgeSet& edges, int n, std::uint64_t count_cap) {
    if (n > 64) throw CapExceeded("count_independent_sets: more than 64 nodes is unsupported");
    const auto nbr = adjacency_masks(edges, n);
    const std::uint64_t all = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    std::uint64_t count = 0;
    count_rec(nbr, all, count, count_cap);
    return count;
}

}  // namespace mcsma
