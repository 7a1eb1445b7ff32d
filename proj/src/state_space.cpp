#include "mcsma/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace mcsma {

int activity(const ActivityState& x) {
    int a = 0;
    for (auto v : x) a += (v != 0);
    return a;
}

int state_distance(const ActivityState& x, const ActivityState& y) {
    int d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != y[i]) d += (x[i] != 0 && y[i] != 0) ? 2 : 1;
    }
    return d;
}

namespace {

// Saturating (C+1)^N for the refusal message and the cap check.
std::uint64_t state_bound(int num_channels, int num_nodes, bool& overflow) {
    std::uint64_t b = 1;
    overflow = false;
    for (int i = 0; i < num_nodes; ++i) {
        const auto base = static_cast<std::uint64_t>(num_channels) + 1;
        if (b > UINT64_MAX / base) {
            overflow = true;
            return UINT64_MAX;
        }
        b *= base;
    }
    return b;
}

}  // namespace

StateSpace StateSpace::enumerate(MultiChannelNetwork net, std::uint64_t state_cap) {
    const int n = net.num_nodes;
    const int c = net.num_channels;
    bool overflow = false;
    const std::uint64_t bound = state_bound(c, n, overflow);
    if (overflow || bound > state_cap) {
        throw CapExceeded("state-space bound (C+1)^N = " +
                          (overflow ? std::string("overflow") : std::to_string(bound)) +
                          " exceeds cap " + std::to_string(state_cap));
    }

    StateSpace space;
    space.net_ = std::move(net);
    const auto& network = space.net_;

    // Depth-first extension over nodes, trying values 0..C in order:
    // emits states in lexicographic order of the value vectors.
    ActivityState values(n, 0);
    std::vector<std::uint64_t> occupied(c, 0);  // active-node mask per channel
    std::vector<int> channel_at(n + 1, -1);     // value chosen at each depth, -1 = untried

    int depth = 0;
    while (depth >= 0) {
        if (depth == n) {
            space.flat_.insert(space.flat_.end(), values.begin(), values.end());
            ++space.count_;
            --depth;
            continue;
        }
        int next = channel_at[depth] + 1;
        // undo the previous choice at this depth
        if (channel_at[depth] > 0) {
            occupied[channel_at[depth] - 1] &= ~(std::uint64_t{1} << depth);
        }
        bool descended = false;
        for (; next <= c; ++next) {
            if (next == 0) {
                values[depth] = 0;
                channel_at[depth] = 0;
                descended = true;
                break;
            }
            if ((network.neighbor_mask(next, depth) & occupied[next - 1]) == 0) {
                values[depth] = next;
                channel_at[depth] = next;
                occupied[next - 1] |= std::uint64_t{1} << depth;
                descended = true;
                break;
            }
        }
        if (descended) {
            ++depth;
            channel_at[depth] = -1;
        } else {
            channel_at[depth] = -1;
            --depth;
        }
    }

    space.activity_.resize(space.count_);
    const bool heterogeneous = !space.net_.rates.homogeneous();
    if (heterogeneous) space.weighted_.resize(space.count_);
    int max_a = 0;
    double max_w = 0;
    for (std::size_t s = 0; s < space.count_; ++s) {
        auto v = space.state_view(s);
        int a = 0;
        double w = 0;
        for (int i = 0; i < n; ++i) {
            if (v[i] != 0) {
                ++a;
                if (heterogeneous) w += space.net_.rates.weight(i, v[i]);
            }
        }
        space.activity_[s] = static_cast<std::uint16_t>(a);
        if (heterogeneous) space.weighted_[s] = w;
        max_a = std::max(max_a, a);
        max_w = std::max(max_w, heterogeneous ? w : static_cast<double>(a));
    }
    space.max_activity_ = max_a;
    space.max_weighted_ = max_w;
    for (std::size_t s = 0; s < space.count_; ++s) {
        if (space.weighted_activity(s) == space.max_weighted_) space.dominant_.push_back(s);
    }
    return space;
}

std::optional<std::size_t> StateSpace::index_of(const ActivityState& x) const {
    if (static_cast<int>(x.size()) != net_.num_nodes) return std::nullopt;
    const int n = net_.num_nodes;
    std::size_t lo = 0, hi = count_;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const int cmp = std::memcmp(flat_.data() + mid * n, x.data(), n);
        if (cmp < 0) {
            lo = mid + 1;
        } else if (cmp > 0) {
            hi = mid;
        } else {
            return mid;
        }
    }
    return std::nullopt;
}

void StateSpace::build_transitions() const {
    const int n = net_.num_nodes;
    const int c = net_.num_channels;
    auto& table = *table_;
    table.offsets.assign(count_ + 1, 0);
    table.items.clear();

    std::vector<std::uint64_t> occupied(c);
    ActivityState scratch(n);
    for (std::size_t s = 0; s < count_; ++s) {
        auto v = state_view(s);
        std::fill(occupied.begin(), occupied.end(), 0);
        for (int i = 0; i < n; ++i) {
            if (v[i] != 0) occupied[v[i] - 1] |= std::uint64_t{1} << i;
        }
        scratch.assign(v.begin(), v.end());
        for (int i = 0; i < n; ++i) {
            if (v[i] == 0) {
                for (int ch = 1; ch <= c; ++ch) {
                    if ((net_.neighbor_mask(ch, i) & occupied[ch - 1]) != 0) continue;
                    scratch[i] = static_cast<std::uint8_t>(ch);
                    const auto target = index_of(scratch);
                    scratch[i] = 0;
                    table.items.push_back({static_cast<std::int32_t>(*target),
                                           static_cast<std::int16_t>(i),
                                           static_cast<std::uint8_t>(ch), true});
                }
            } else {
                const int ch = v[i];
                scratch[i] = 0;
                const auto target = index_of(scratch);
                scratch[i] = v[i];
                table.items.push_back({static_cast<std::int32_t>(*target),
                                       static_cast<std::int16_t>(i),
                                       static_cast<std::uint8_t>(ch), false});
            }
        }
        table.offsets[s + 1] = table.items.size();
    }
    table.built = true;
}

std::span<const Transition> StateSpace::transitions(std::size_t idx) const {
    std::call_once(table_->once, [this] { build_transitions(); });
    const auto& table = *table_;
    return {table.items.data() + table.offsets[idx],
            static_cast<std::size_t>(table.offsets[idx + 1] - table.offsets[idx])};
}

int StateSpace::state_distance(std::size_t i, std::size_t j) const {
    auto x = state_view(i);
    auto y = state_view(j);
    int d = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] != y[k]) d += (x[k] != 0 && y[k] != 0) ? 2 : 1;
    }
    return d;
}

double UniformizedChain::prob(std::size_t state, std::size_t k) const {
    const auto span = space->transitions(state);
    (void)span;
    // move_prob is parallel to the whole transition table; recover the
    // flat position from the span start.
    const Transition* base = space->transitions(0).data();
    return move_prob[static_cast<std::size_t>(span.data() - base) + k];
}

UniformizedChain uniformized_matrix(const StateSpace& space, double nu) {
    if (nu <= 0) throw InputError("uniformized_matrix: nu must be positive");
    const auto& rates = space.network().rates;
    const std::size_t m = space.size();

    UniformizedChain chain;
    chain.space = &space;
    chain.nu = nu;

    // exit rates per transition, and the exact maximal exit rate
    std::vector<double> rate;
    std::vector<std::size_t> offsets(m + 1, 0);
    double max_exit = 0;
    for (std::size_t s = 0; s < m; ++s) {
        double exit = 0;
        for (const auto& t : space.transitions(s)) {
            const double r = t.activation ? rates.activation_rate(t.node, t.channel, nu) : 1.0;
            rate.push_back(r);
            exit += r;
        }
        offsets[s + 1] = rate.size();
        max_exit = std::max(max_exit, exit);
    }
    double q_max = max_exit;
    if (rates.homogeneous()) {
        q_max = std::max(q_max, static_cast<double>(space.num_channels()) *
                                    space.num_nodes() * nu);
    }
    chain.q_max = q_max;

    chain.move_prob.resize(rate.size());
    chain.self_prob.resize(m);
    for (std::size_t s = 0; s < m; ++s) {
        double row = 0;
        for (std::size_t k = offsets[s]; k < offsets[s + 1]; ++k) {
            chain.move_prob[k] = rate[k] / q_max;
            row += chain.move_prob[k];
        }
        chain.self_prob[s] = 1.0 - row;
    }
    return chain;
}

}  // namespace mcsma
