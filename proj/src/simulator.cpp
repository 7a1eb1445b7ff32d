#include "mcsma/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "mcsma/analysis.hpp"

namespace mcsma {

Distribution Distribution::uniform(double a, double b) {
    if (!(a >= 0) || !(b > a)) throw InputError("uniform distribution needs 0 <= a < b");
    if (a + b <= 0) throw InputError("uniform distribution must have positive mean");
    return {Kind::Uniform, a, b};
}

Distribution Distribution::parse(const std::string& text) {
    if (text == "exp" || text == "exponential") return exponential();
    if (text == "det" || text == "deterministic") return deterministic();
    if (text.rfind("unif:", 0) == 0) {
        const auto comma = text.find(',', 5);
        if (comma == std::string::npos) throw InputError("expected unif:a,b");
        return uniform(std::stod(text.substr(5, comma - 5)), std::stod(text.substr(comma + 1)));
    }
    throw InputError("unknown distribution '" + text + "' (use exp, det or unif:a,b)");
}

double Distribution::sample(Rng& rng, double mean) const {
    switch (kind) {
        case Kind::Exponential:
            return -mean * std::log(rng.uniform_pos());
        case Kind::Deterministic:
            return mean;
        case Kind::Uniform: {
            // rescale so the draw has the requested mean exactly
            const double u = lo + (hi - lo) * rng.uniform01();
            return mean * u / ((lo + hi) / 2.0);
        }
    }
    return mean;
}

namespace {

struct NetView {
    const MultiChannelNetwork* net;
    int n, c;
    double nu;

    bool can_activate(const ActivityState& x, const std::vector<std::uint64_t>& occupied,
                      int node, int channel) const {
        return x[node] == 0 &&
               (net->neighbor_mask(channel, node) & occupied[channel - 1]) == 0;
    }
};

void apply_move(ActivityState& x, std::vector<std::uint64_t>& occupied, int node, int channel,
                bool activation) {
    if (activation) {
        x[node] = static_cast<std::uint8_t>(channel);
        occupied[channel - 1] |= std::uint64_t{1} << node;
    } else {
        x[node] = 0;
        occupied[channel - 1] &= ~(std::uint64_t{1} << node);
    }
}

std::vector<std::uint64_t> occupied_masks(const ActivityState& x, int c) {
    std::vector<std::uint64_t> occ(c, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0) occ[x[i] - 1] |= std::uint64_t{1} << i;
    }
    return occ;
}

struct StatsAccumulator {
    const StateSpace* space;
    int n, c;
    double time = 0;
    std::vector<double> node_time;                  // per node
    std::vector<std::vector<double>> channel_time;  // N x C
    std::vector<double> chan_count_time;            // per channel
    std::vector<double> state_time;
    std::vector<std::uint64_t> state_visits;

    StatsAccumulator(int n_, int c_, const StateSpace* sp)
        : space(sp), n(n_), c(c_), node_time(n_, 0),
          channel_time(n_, std::vector<double>(c_, 0)), chan_count_time(c_, 0) {
        if (space) {
            state_time.assign(space->size(), 0.0);
            state_visits.assign(space->size(), 0);
        }
    }

    void dwell(const ActivityState& x, double dt, bool count_visit) {
        if (dt <= 0 && !count_visit) return;
        time += dt;
        for (int i = 0; i < n; ++i) {
            if (x[i] != 0) {
                node_time[i] += dt;
                channel_time[i][x[i] - 1] += dt;
                chan_count_time[x[i] - 1] += dt;
            }
        }
        if (space) {
            if (const auto idx = space->index_of(x)) {
                state_time[*idx] += dt;
                if (count_visit) ++state_visits[*idx];
            }
        }
    }

    void fold_into(TrajectoryStats& out) const {
        out.elapsed += time;
        for (int i = 0; i < n; ++i) {
            out.node_active_fraction[i] += node_time[i];
            for (int ch = 0; ch < c; ++ch) out.node_channel_fraction[i][ch] += channel_time[i][ch];
        }
        for (int ch = 0; ch < c; ++ch) out.channel_occupancy[ch] += chan_count_time[ch];
        for (std::size_t s = 0; s < state_time.size(); ++s) {
            out.state_occupancy[s] += state_time[s];
            out.state_visits[s] += state_visits[s];
        }
    }
};

constexpr std::uint64_t kDefaultEventCap = 2'000'000'000ull;

// One Gillespie trajectory: samples the jump chain and exponential
// holding times from the exact rate table.
template <typename OnEvent>
void run_ctmc(const NetView& view, ActivityState x, double horizon, std::uint64_t max_events,
              Rng& rng, StatsAccumulator* stats, OnEvent&& on_event, bool* capped) {
    auto occupied = occupied_masks(x, view.c);
    double t = 0;
    std::uint64_t events = 0;
    struct Move {
        int node, channel;
        bool activation;
        double rate;
    };
    std::vector<Move> moves;
    if (capped) *capped = false;
    while (true) {
        moves.clear();
        double total = 0;
        for (int i = 0; i < view.n; ++i) {
            if (x[i] == 0) {
                for (int ch = 1; ch <= view.c; ++ch) {
                    if (view.can_activate(x, occupied, i, ch)) {
                        const double r = view.net->rates.activation_rate(i, ch, view.nu);
                        moves.push_back({i, ch, true, r});
                        total += r;
                    }
                }
            } else {
                moves.push_back({i, x[i], false, 1.0});
                total += 1.0;
            }
        }
        const double dt = -std::log(rng.uniform_pos()) / total;
        if (horizon > 0 && t + dt >= horizon) {
            if (stats) stats->dwell(x, horizon - t, false);
            return;
        }
        if (stats) stats->dwell(x, dt, true);
        t += dt;
        double pick = rng.uniform01() * total;
        std::size_t k = 0;
        for (; k + 1 < moves.size(); ++k) {
            pick -= moves[k].rate;
            if (pick <= 0) break;
        }
        const auto& mv = moves[k];
        apply_move(x, occupied, mv.node, mv.channel, mv.activation);
        if (!on_event(t, mv.node, mv.channel, mv.activation, x)) return;
        if (++events >= max_events) {
            if (capped) *capped = true;
            return;
        }
    }
}

// One event-driven trajectory: an independent timer per (node, channel)
// back-off plus one per running transmission; a blocked activation
// attempt draws a fresh back-off.
template <typename OnEvent>
void run_event_driven(const NetView& view, ActivityState x, double horizon,
                      std::uint64_t max_events, const Distribution& backoff,
                      const Distribution& transmit, Rng& rng, StatsAccumulator* stats,
                      OnEvent&& on_event, bool* capped) {
    const int vn = view.n * view.c;
    auto occupied = occupied_masks(x, view.c);
    struct Ev {
        double time;
        std::uint64_t seq;
        int vnode;
        bool operator>(const Ev& o) const {
            return time != o.time ? time > o.time : seq > o.seq;
        }
    };
    std::priority_queue<Ev, std::vector<Ev>, std::greater<>> heap;
    std::vector<char> transmitting(vn, 0);
    std::uint64_t seq = 0;
    if (capped) *capped = false;

    for (int i = 0; i < view.n; ++i) {
        for (int ch = 1; ch <= view.c; ++ch) {
            const int v = i * view.c + (ch - 1);
            if (x[i] == ch) {
                transmitting[v] = 1;
                heap.push({transmit.sample(rng, 1.0), seq++, v});
            } else {
                const double mean = 1.0 / view.net->rates.activation_rate(i, ch, view.nu);
                heap.push({backoff.sample(rng, mean), seq++, v});
            }
        }
    }

    double t = 0;
    std::uint64_t events = 0;
    while (!heap.empty()) {
        const Ev ev = heap.top();
        heap.pop();
        if (horizon > 0 && ev.time >= horizon) {
            if (stats) stats->dwell(x, horizon - t, false);
            return;
        }
        const int i = ev.vnode / view.c;
        const int ch = ev.vnode % view.c + 1;
        const double mean_backoff = 1.0 / view.net->rates.activation_rate(i, ch, view.nu);
        if (transmitting[ev.vnode]) {
            // transmission complete
            if (stats) stats->dwell(x, ev.time - t, true);
            t = ev.time;
            transmitting[ev.vnode] = 0;
            apply_move(x, occupied, i, ch, false);
            heap.push({t + backoff.sample(rng, mean_backoff), seq++, ev.vnode});
            if (!on_event(t, i, ch, false, x)) return;
            if (++events >= max_events) {
                if (capped) *capped = true;
                return;
            }
        } else if (view.can_activate(x, occupied, i, ch)) {
            if (stats) stats->dwell(x, ev.time - t, true);
            t = ev.time;
            transmitting[ev.vnode] = 1;
            apply_move(x, occupied, i, ch, true);
            heap.push({t + transmit.sample(rng, 1.0), seq++, ev.vnode});
            if (!on_event(t, i, ch, true, x)) return;
            if (++events >= max_events) {
                if (capped) *capped = true;
                return;
            }
        } else {
            // blocked attempt: fresh back-off, not a state change
            heap.push({ev.time + backoff.sample(rng, mean_backoff), seq++, ev.vnode});
        }
    }
}

void validate_config(const SimConfig& config) {
    if (config.replicas < 1) throw InputError("replicas must be positive");
    if (config.mode == SimConfig::Mode::CtmcExact &&
        (!config.backoff.exponential_kind() || !config.transmit.exponential_kind())) {
        throw InputError("ctmc-exact mode requires exponential distributions");
    }
}

}  // namespace

TrajectoryStats simulate(const MultiChannelNetwork& net, const StateSpace* space,
                         const SimConfig& config, std::vector<EventRecord>* event_log) {
    validate_config(config);
    if (config.horizon <= 0) throw InputError("simulate needs a positive horizon");
    const NetView view{&net, net.num_nodes, net.num_channels, net.rates.nu};
    const std::uint64_t cap = config.max_events ? config.max_events : kDefaultEventCap;

    TrajectoryStats out;
    out.node_active_fraction.assign(net.num_nodes, 0);
    out.node_channel_fraction.assign(net.num_nodes, std::vector<double>(net.num_channels, 0));
    out.channel_occupancy.assign(net.num_channels, 0);
    if (space) {
        out.state_occupancy.assign(space->size(), 0);
        out.state_visits.assign(space->size(), 0);
    }

    for (int rep = 0; rep < config.replicas; ++rep) {
        Rng rng(config.seed, static_cast<std::uint64_t>(rep), 0);
        StatsAccumulator acc(net.num_nodes, net.num_channels, space);
        ActivityState x(net.num_nodes, 0);
        auto log_event = [&](double t, int node, int channel, bool act, const ActivityState&) {
            ++out.events;
            if (event_log) event_log->push_back({rep, t, node, channel, act});
            return true;
        };
        if (config.mode == SimConfig::Mode::CtmcExact) {
            run_ctmc(view, x, config.horizon, cap, rng, &acc, log_event, nullptr);
        } else {
            run_event_driven(view, x, config.horizon, cap, config.backoff, config.transmit, rng,
                             &acc, log_event, nullptr);
        }
        acc.fold_into(out);
    }
    if (out.events == 0) throw InputError("horizon too small: no event occurred");

    // normalize time-weighted tallies into fractions
    const double total = out.elapsed;
    for (auto& f : out.node_active_fraction) f /= total;
    for (auto& row : out.node_channel_fraction) {
        for (auto& f : row) f /= total;
    }
    for (auto& f : out.channel_occupancy) f /= total;
    for (auto& f : out.state_occupancy) f /= total;
    return out;
}

HittingEstimate estimate_hitting(const MultiChannelNetwork& net, const ActivityState& start,
                                 const std::vector<ActivityState>& target, double nu,
                                 const SimConfig& config) {
    validate_config(config);
    if (target.empty()) throw InputError("estimate_hitting needs a nonempty target set");
    std::set<ActivityState> target_set(target.begin(), target.end());
    if (target_set.count(start)) throw InputError("start state must lie outside the target");

    const MultiChannelNetwork scaled = net.with_nu(nu);
    const NetView view{&scaled, net.num_nodes, net.num_channels, nu};
    const std::uint64_t cap = config.max_events ? config.max_events : kDefaultEventCap;

    HittingEstimate est;
    for (int rep = 0; rep < config.replicas; ++rep) {
        Rng rng(config.seed, static_cast<std::uint64_t>(rep), 1);
        double hit_time = -1;
        auto watch = [&](double t, int, int, bool, const ActivityState& x) {
            if (target_set.count(x)) {
                hit_time = t;
                return false;
            }
            return true;
        };
        bool capped = false;
        if (config.mode == SimConfig::Mode::CtmcExact) {
            run_ctmc(view, start, 0.0, cap, rng, nullptr, watch, &capped);
        } else {
            run_event_driven(view, start, 0.0, cap, config.backoff, config.transmit, rng,
                             nullptr, watch, &capped);
        }
        if (hit_time >= 0) {
            est.samples.push_back(hit_time);
        } else {
            ++est.censored;
        }
    }
    if (est.samples.empty()) {
        throw SolveError("all " + std::to_string(config.replicas) +
                         " replicas exceeded the event cap before hitting the target");
    }
    double sum = 0;
    for (double s : est.samples) sum += s;
    est.mean = sum / est.samples.size();
    double var = 0;
    for (double s : est.samples) var += (s - est.mean) * (s - est.mean);
    if (est.samples.size() > 1) {
        var /= (est.samples.size() - 1);
        est.stderr_ = std::sqrt(var / est.samples.size());
    }
    return est;
}

double insensitivity_check(const MultiChannelNetwork& net, double nu, const SimConfig& config) {
    if (config.mode != SimConfig::Mode::EventDriven) {
        throw InputError("insensitivity_check runs in event-driven mode");
    }
    if (config.horizon < 1e3) {
        throw InputError("horizon too short for a meaningful occupancy comparison "
                         "(need at least 1e3 mean transmission times)");
    }
    const MultiChannelNetwork scaled = net.with_nu(nu);
    const StateSpace space = StateSpace::enumerate(scaled);
    const auto stats = simulate(scaled, &space, config);
    const auto pi = stationary_distribution(space, nu);
    double tv = 0;
    for (std::size_t s = 0; s < space.size(); ++s) {
        tv += std::abs(stats.state_occupancy[s] - pi[s]);
    }
    return tv / 2.0;
}

}  // namespace mcsma
