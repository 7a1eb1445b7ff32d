#include "doctest.h"

#include <cmath>
#include <map>

#include "graphs.hpp"

#include "mcsma/analysis.hpp"
#include "mcsma/simulator.hpp"

using namespace mcsma;

namespace {

ActivityState st(std::initializer_list<int> values) {
    ActivityState x;
    for (int v : values) x.push_back(static_cast<std::uint8_t>(v));
    return x;
}

}  // namespace

TEST_CASE("identical seed and config give identical event logs") {
    const auto net = graphs::make(2, graphs::complete(2), 1, 2.0);
    SimConfig config;
    config.seed = 42;
    config.horizon = 200;
    for (auto mode : {SimConfig::Mode::CtmcExact, SimConfig::Mode::EventDriven}) {
        config.mode = mode;
        std::vector<EventRecord> log_a, log_b;
        simulate(net, nullptr, config, &log_a);
        simulate(net, nullptr, config, &log_b);
        REQUIRE(log_a.size() == log_b.size());
        REQUIRE(log_a.size() > 0);
        for (std::size_t i = 0; i < log_a.size(); ++i) {
            CHECK(log_a[i].time == log_b[i].time);
            CHECK(log_a[i].node == log_b[i].node);
            CHECK(log_a[i].channel == log_b[i].channel);
            CHECK(log_a[i].activation == log_b[i].activation);
        }
    }
}

TEST_CASE("different seeds decorrelate replicas") {
    const auto net = graphs::make(2, graphs::complete(2), 1, 2.0);
    SimConfig config;
    config.horizon = 50;
    config.seed = 1;
    std::vector<EventRecord> log_a, log_b;
    simulate(net, nullptr, config, &log_a);
    config.seed = 2;
    simulate(net, nullptr, config, &log_b);
    bool differs = log_a.size() != log_b.size();
    for (std::size_t i = 0; !differs && i < log_a.size(); ++i) {
        differs = log_a[i].time != log_b[i].time;
    }
    CHECK(differs);
}

TEST_CASE("exact-mode occupancies converge to the stationary law on K2") {
    const auto net = graphs::make(2, graphs::complete(2), 1, 2.0);
    const auto space = StateSpace::enumerate(net);
    SimConfig config;
    config.seed = 7;
    config.horizon = 1e5;
    const auto stats = simulate(net, &space, config);
    const auto pi = stationary_distribution(space, 2.0);
    // pi = (0.2, 0.4, 0.4); time-average fluctuations at this horizon
    // stay well inside 0.01
    for (std::size_t s = 0; s < space.size(); ++s) {
        CHECK(std::abs(stats.state_occupancy[s] - pi[s]) < 0.01);
    }
    CHECK(stats.node_active_fraction[0] == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("the empty state dominates when nu is small") {
    const auto net = graphs::make(2, graphs::complete(2), 1, 1e-3);
    const auto space = StateSpace::enumerate(net);
    SimConfig config;
    config.seed = 3;
    config.horizon = 2e4;
    const auto stats = simulate(net, &space, config);
    CHECK(stats.state_occupancy[*space.index_of(st({0, 0}))] > 0.99);
}

TEST_CASE("trajectory fractions are consistent") {
    const auto net = graphs::make(4, graphs::cycle(4), 2, 5.0);
    SimConfig config;
    config.seed = 11;
    config.horizon = 5e3;
    const auto stats = simulate(net, nullptr, config);
    for (int i = 0; i < 4; ++i) {
        double row = 0;
        for (int c = 0; c < 2; ++c) {
            CHECK(stats.node_channel_fraction[i][c] >= 0.0);
            row += stats.node_channel_fraction[i][c];
        }
        CHECK(row == doctest::Approx(stats.node_active_fraction[i]).epsilon(1e-9));
        CHECK(row <= 1.0 + 1e-12);
    }
}

TEST_CASE("event-driven and exact modes agree with exponential timers") {
    const auto net = graphs::make(2, graphs::complete(2), 1, 2.0);
    const auto space = StateSpace::enumerate(net);
    SimConfig config;
    config.seed = 5;
    config.horizon = 1e5;
    const auto exact = simulate(net, &space, config);
    config.mode = SimConfig::Mode::EventDriven;
    const auto event = simulate(net, &space, config);
    for (std::size_t s = 0; s < space.size(); ++s) {
        CHECK(std::abs(exact.state_occupancy[s] - event.state_occupancy[s]) < 0.015);
    }
}

TEST_CASE("empirical jump frequencies match pi-weighted rates") {
    const auto net = graphs::make(2, graphs::complete(2), 1, 2.0);
    const auto space = StateSpace::enumerate(net);
    SimConfig config;
    config.seed = 13;
    config.horizon = 1e5;
    std::vector<EventRecord> log;
    simulate(net, &space, config, &log);

    // reconstruct edge traversal counts from the event log
    std::map<std::pair<std::size_t, std::size_t>, double> counts;
    ActivityState x(2, 0);
    std::size_t total = 0;
    for (const auto& ev : log) {
        ActivityState y = x;
        y[ev.node] = ev.activation ? static_cast<std::uint8_t>(ev.channel) : 0;
        counts[{*space.index_of(x), *space.index_of(y)}] += 1;
        x = y;
        ++total;
    }
    const auto pi = stationary_distribution(space, 2.0);
    const auto& rates = net.rates;
    double z = 0;  // total jump intensity
    for (std::size_t s = 0; s < space.size(); ++s) {
        for (const auto& t : space.transitions(s)) {
            z += pi[s] * (t.activation ? rates.activation_rate(t.node, t.channel, 2.0) : 1.0);
        }
    }
    for (std::size_t s = 0; s < space.size(); ++s) {
        for (const auto& t : space.transitions(s)) {
            const double q = t.activation ? rates.activation_rate(t.node, t.channel, 2.0) : 1.0;
            const double expected = pi[s] * q / z;
            const double observed =
                counts[{s, static_cast<std::size_t>(t.target)}] / static_cast<double>(total);
            const double sigma = std::sqrt(expected * (1 - expected) / total);
            CHECK(std::abs(observed - expected) < 5 * sigma + 1e-6);
        }
    }
}

TEST_CASE("hitting estimates agree with the closed form on K2") {
    const auto net = graphs::make(2, graphs::complete(2));
    SimConfig config;
    config.seed = 2024;
    config.replicas = 2000;
    const auto est =
        estimate_hitting(net, st({1, 0}), {st({0, 1})}, 100.0, config);
    CHECK(est.censored == 0);
    CHECK(est.samples.size() == 2000);
    const double exact = 2.0 + 1.0 / 100.0;
    CHECK(std::abs(est.mean - exact) < 3 * est.stderr_);
    CHECK(est.stderr_ > 0);
}

TEST_CASE("hitting estimates agree with the linear solve on C4") {
    const auto net = graphs::make(4, graphs::cycle(4));
    const auto space = StateSpace::enumerate(net.with_nu(100.0));
    const auto& dom = space.dominant_states();
    const auto exact = exact_hitting_time(space, 100.0, dom[0], {dom[1]});
    SimConfig config;
    config.seed = 99;
    config.replicas = 1500;
    const auto est = estimate_hitting(net, space.state(dom[0]), {space.state(dom[1])}, 100.0,
                                      config);
    CHECK(est.censored == 0);
    CHECK(std::abs(est.mean - exact.expected_time) < 3 * est.stderr_);
}

TEST_CASE("single-jump target gives mean one over the rate") {
    // from the empty K2 state, both activations fire at rate nu each:
    // the one-jump hitting time of {10, 01} has mean 1/(2 nu)
    const auto net = graphs::make(2, graphs::complete(2));
    SimConfig config;
    config.seed = 8;
    config.replicas = 4000;
    const auto est = estimate_hitting(net, st({0, 0}), {st({1, 0}), st({0, 1})}, 2.0, config);
    CHECK(std::abs(est.mean - 0.25) < 3 * est.stderr_);
}

TEST_CASE("event cap censoring is reported") {
    const auto net = graphs::make(4, graphs::cycle(4));
    SimConfig config;
    config.seed = 77;
    config.replicas = 10;
    config.max_events = 5;  // far too few to cross the barrier at nu = 100
    CHECK_THROWS_AS(estimate_hitting(net, st({1, 0, 1, 0}), {st({0, 1, 0, 1})}, 100.0, config),
                    SolveError);
}

TEST_CASE("insensitivity: deterministic back-offs keep the product form") {
    const auto net = graphs::make(2, graphs::complete(2));
    SimConfig config;
    config.seed = 31;
    config.horizon = 1e6;
    config.mode = SimConfig::Mode::EventDriven;
    config.backoff = Distribution::deterministic();
    const double tv = insensitivity_check(net, 2.0, config);
    CHECK(tv < 0.02);
}

TEST_CASE("insensitivity: uniform transmissions on C4 with two channels") {
    const auto net = graphs::make(4, graphs::cycle(4), 2);
    SimConfig config;
    config.seed = 32;
    config.horizon = 5e5;
    config.mode = SimConfig::Mode::EventDriven;
    config.transmit = Distribution::uniform(0.5, 1.5);
    const double tv = insensitivity_check(net, 2.0, config);
    CHECK(tv < 0.03);
}

TEST_CASE("exponential pair sanity for the insensitivity route") {
    const auto net = graphs::make(2, graphs::complete(2));
    SimConfig config;
    config.seed = 33;
    config.horizon = 1e6;
    config.mode = SimConfig::Mode::EventDriven;
    const double tv = insensitivity_check(net, 2.0, config);
    CHECK(tv < 0.02);
}

TEST_CASE("configuration validation") {
    const auto net = graphs::make(2, graphs::complete(2));
    SimConfig config;
    config.horizon = 10;
    config.backoff = Distribution::deterministic();
    CHECK_THROWS_AS(simulate(net, nullptr, config, nullptr), InputError);  // exact + det
    config.mode = SimConfig::Mode::EventDriven;
    config.horizon = 0;
    CHECK_THROWS_AS(simulate(net, nullptr, config, nullptr), InputError);
    config.horizon = 100;
    config.replicas = 0;
    CHECK_THROWS_AS(simulate(net, nullptr, config, nullptr), InputError);

    CHECK_THROWS_AS(Distribution::parse("nope"), InputError);
    CHECK(Distribution::parse("unif:0.5,1.5").kind == Distribution::Kind::Uniform);
    CHECK(Distribution::parse("det").kind == Distribution::Kind::Deterministic);

    SimConfig short_config;
    short_config.mode = SimConfig::Mode::EventDriven;
    short_config.horizon = 10;
    CHECK_THROWS_AS(insensitivity_check(net, 2.0, short_config), InputError);
}

TEST_CASE("distribution samples have the configured means") {
    Rng rng(123, 0, 0);
    for (const auto& dist : {Distribution::exponential(), Distribution::deterministic(),
                             Distribution::uniform(0.5, 1.5)}) {
        double sum = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) sum += dist.sample(rng, 0.5);
        CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    }
}
