#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "mcsma/network.hpp"

namespace mcsma {

// Joint activity state: values[i] = 0 when node i is inactive, c in
// 1..C when it is active on channel c.
using ActivityState = std::vector<std::uint8_t>;

// Number of active nodes a(x).
int activity(const ActivityState& x);

// Minimum number of single-coordinate CSMA steps from x to y. Channel
// changes count twice: the node has to deactivate first.
int state_distance(const ActivityState& x, const ActivityState& y);

// One feasible single-step move of the dynamics.
struct Transition {
    std::int32_t target;   // ordinal of the state reached
    std::int16_t node;     // node whose coordinate changes
    std::uint8_t channel;  // channel involved (1-based)
    bool activation;       // true: 0 -> channel, false: channel -> 0
};

inline constexpr std::uint64_t kDefaultStateCap = 5'000'000;

// The complete feasible state space of a network, in lexicographic
// order of the value vectors, with the single-step transition
// structure. Immutable once enumerated; safe to share across threads.
class StateSpace {
  public:
    // Enumerates all feasible states. Refuses (CapExceeded) when the
    // a-priori bound (C+1)^N exceeds state_cap.
    static StateSpace enumerate(MultiChannelNetwork net,
                                std::uint64_t state_cap = kDefaultStateCap);

    const MultiChannelNetwork& network() const { return net_; }
    int num_nodes() const { return net_.num_nodes; }
    int num_channels() const { return net_.num_channels; }
    bool homogeneous() const { return net_.rates.homogeneous(); }

    std::size_t size() const { return count_; }

    std::span<const std::uint8_t> state_view(std::size_t idx) const {
        return {flat_.data() + idx * net_.num_nodes, static_cast<std::size_t>(net_.num_nodes)};
    }
    ActivityState state(std::size_t idx) const {
        auto v = state_view(idx);
        return ActivityState(v.begin(), v.end());
    }

    // Ordinal of a state vector, if feasible/present.
    std::optional<std::size_t> index_of(const ActivityState& x) const;

    int activity(std::size_t idx) const { return activity_[idx]; }

    // Weighted activity landscape value; coincides with a(x) for the
    // homogeneous model.
    double weighted_activity(std::size_t idx) const {
        return weighted_.empty() ? static_cast<double>(activity_[idx]) : weighted_[idx];
    }

    // A(C) = max_x a(x).
    int max_activity() const { return max_activity_; }
    double max_weighted_activity() const { return max_weighted_; }

    // Ordinals of the dominant states (argmax of the landscape), in
    // enumeration order.
    const std::vector<std::size_t>& dominant_states() const { return dominant_; }

    // Single-step moves out of a state (built lazily, thread-safe).
    std::span<const Transition> transitions(std::size_t idx) const;

    int state_distance(std::size_t i, std::size_t j) const;

    StateSpace(StateSpace&&) = default;
    StateSpace& operator=(StateSpace&&) = default;
    StateSpace(const StateSpace&) = delete;
    StateSpace& operator=(const StateSpace&) = delete;

  private:
    StateSpace() = default;
    void build_transitions() const;

    MultiChannelNetwork net_;
    std::size_t count_ = 0;
    std::vector<std::uint8_t> flat_;       // count_ * N state bytes
    std::vector<std::uint16_t> activity_;  // a(x) per state
    std::vector<double> weighted_;         // empty for homogeneous
    int max_activity_ = 0;
    double max_weighted_ = 0;
    std::vector<std::size_t> dominant_;

    struct TransitionTable {
        std::once_flag once;
        bool built = false;
        std::vector<std::uint64_t> offsets;
        std::vector<Transition> items;
    };
    mutable std::unique_ptr<TransitionTable> table_ = std::make_unique<TransitionTable>();
};

// Uniformized discrete-time chain of the activity process. For the
// homogeneous model with C*nu >= 1 the uniformization rate is the
// classical q_max = C*N*nu; otherwise the exact maximal exit rate is
// used so rows stay stochastic.
struct UniformizedChain {
    const StateSpace* space = nullptr;
    double nu = 0;
    double q_max = 0;
    std::vector<double> self_prob;  // P(x,x) per state
    std::vector<double> move_prob;  // parallel to the transition table

    // P(x, transitions(x)[k].target)
    double prob(std::size_t state, std::size_t k) const;
};

UniformizedChain uniformized_matrix(const StateSpace& space, double nu);

}  // namespace mcsma
