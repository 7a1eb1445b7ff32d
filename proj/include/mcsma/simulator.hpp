#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcsma/rng.hpp"
#include "mcsma/state_space.hpp"

namespace mcsma {

// Timer distribution shape; draws are rescaled so the mean equals the
// model mean exactly (1/nu_{i,c} for back-offs, 1 for transmissions).
struct Distribution {
    enum class Kind { Exponential, Deterministic, Uniform };
    Kind kind = Kind::Exponential;
    double lo = 1.0, hi = 1.0;  // uniform support before unit-mean rescaling

    static Distribution exponential() { return {}; }
    static Distribution deterministic() { return {Kind::Deterministic, 1.0, 1.0}; }
    static Distribution uniform(double a, double b);

    // Parses "exp", "det" or "unif:a,b".
    static Distribution parse(const std::string& text);

    double sample(Rng& rng, double mean) const;
    bool exponential_kind() const { return kind == Kind::Exponential; }
};

struct SimConfig {
    std::uint64_t seed = 0;
    int replicas = 1;
    double horizon = 0;            // simulated time per replica (simulate/insensitivity)
    std::uint64_t max_events = 0;  // per-replica event cap; 0 = engine default
    Distribution backoff = Distribution::exponential();
    Distribution transmit = Distribution::exponential();
    enum class Mode { CtmcExact, EventDriven } mode = Mode::CtmcExact;
};

struct EventRecord {
    int replica;
    double time;
    int node;
    int channel;
    bool activation;
};

struct TrajectoryStats {
    double elapsed = 0;  // total simulated time across replicas
    std::uint64_t events = 0;
    std::vector<double> node_active_fraction;          // per node
    std::vector<std::vector<double>> node_channel_fraction;  // N x C
    std::vector<double> channel_occupancy;             // time-average active count per channel
    std::vector<double> state_occupancy;               // per ordinal; filled when space given
    std::vector<std::uint64_t> state_visits;
};

// Runs `config.replicas` independent trajectories from the empty state
// and accumulates time-weighted statistics. When `space` is given,
// per-state occupancy is tracked. Reproducible given (seed, replica).
TrajectoryStats simulate(const MultiChannelNetwork& net, const StateSpace* space,
                         const SimConfig& config,
                         std::vector<EventRecord>* event_log = nullptr);

struct HittingEstimate {
    double mean = 0;
    double stderr_ = 0;
    std::vector<double> samples;
    int censored = 0;  // replicas that hit the event cap before the target
};

// Monte-Carlo estimate of the expected hitting time of `target` from
// `start` at scale nu.
HittingEstimate estimate_hitting(const MultiChannelNetwork& net, const ActivityState& start,
                                 const std::vector<ActivityState>& target, double nu,
                                 const SimConfig& config);

// Total-variation distance between the time-weighted empirical state
// occupancy of an event-driven run and the product-form stationary
// distribution.
double insensitivity_check(const MultiChannelNetwork& net, double nu, const SimConfig& config);

}  // namespace mcsma
