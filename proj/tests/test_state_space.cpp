#include "doctest.h"

#include "graphs.hpp"
#include "oracle.hpp"

#include "mcsma/state_space.hpp"

using namespace mcsma;

namespace {

ActivityState st(std::initializer_list<int> values) {
    ActivityState x;
    for (int v : values) x.push_back(static_cast<std::uint8_t>(v));
    return x;
}

}  // namespace

TEST_CASE("P3 single channel enumerates its five independent sets") {
    const auto space = StateSpace::enumerate(graphs::make(3, graphs::path(3)));
    REQUIRE(space.size() == 5);
    CHECK(space.state(0) == st({0, 0, 0}));
    CHECK(space.state(1) == st({0, 0, 1}));
    CHECK(space.state(2) == st({0, 1, 0}));
    CHECK(space.state(3) == st({1, 0, 0}));
    CHECK(space.state(4) == st({1, 0, 1}));
}

TEST_CASE("K2 with two channels has seven states") {
    const auto space = StateSpace::enumerate(graphs::make(2, graphs::complete(2), 2));
    REQUIRE(space.size() == 7);
    // lexicographic, same-channel pairs 11 and 22 excluded
    CHECK(space.state(0) == st({0, 0}));
    CHECK(space.state(1) == st({0, 1}));
    CHECK(space.state(2) == st({0, 2}));
    CHECK(space.state(3) == st({1, 0}));
    CHECK(space.state(4) == st({1, 2}));
    CHECK(space.state(5) == st({2, 0}));
    CHECK(space.state(6) == st({2, 1}));
}

TEST_CASE("edgeless graph is unconstrained") {
    const auto space = StateSpace::enumerate(graphs::make(2, {}));
    CHECK(space.size() == 4);
}

TEST_CASE("enumeration matches the odometer oracle across instances") {
    const std::vector<MultiChannelNetwork> nets = {
        graphs::make(4, graphs::cycle(4)),      graphs::make(4, graphs::cycle(4), 2),
        graphs::make(3, graphs::complete(3), 2), graphs::make(6, graphs::cycle(6), 2),
        graphs::make(6, graphs::grid(2, 3)),
    };
    for (const auto& net : nets) {
        const auto space = StateSpace::enumerate(net);
        const auto reference = oracle::enumerate_states(net);
        REQUIRE(space.size() == reference.size());
        for (std::size_t s = 0; s < reference.size(); ++s) {
            CHECK(space.state(s) == reference[s]);
            CHECK(space.index_of(reference[s]) == s);
        }
    }
}

TEST_CASE("activity counts and dominant states") {
    const auto c4 = StateSpace::enumerate(graphs::make(4, graphs::cycle(4)));
    CHECK(c4.max_activity() == 2);
    REQUIRE(c4.dominant_states().size() == 2);
    CHECK(c4.state(c4.dominant_states()[0]) == st({0, 1, 0, 1}));
    CHECK(c4.state(c4.dominant_states()[1]) == st({1, 0, 1, 0}));

    const auto k3 = StateSpace::enumerate(graphs::make(3, graphs::complete(3)));
    CHECK(k3.max_activity() == 1);
    CHECK(k3.dominant_states().size() == 3);

    const auto k2c2 = StateSpace::enumerate(graphs::make(2, graphs::complete(2), 2));
    CHECK(k2c2.max_activity() == 2);
    REQUIRE(k2c2.dominant_states().size() == 2);
    CHECK(k2c2.state(k2c2.dominant_states()[0]) == st({1, 2}));
    CHECK(k2c2.state(k2c2.dominant_states()[1]) == st({2, 1}));

    CHECK(activity(st({0, 0, 0})) == 0);
    CHECK(activity(st({1, 0, 2})) == 2);
}

TEST_CASE("max activity across channel counts") {
    CHECK(StateSpace::enumerate(graphs::make(4, graphs::cycle(4), 2)).max_activity() == 4);
    CHECK(StateSpace::enumerate(graphs::make(4, graphs::cycle(4), 3)).max_activity() == 4);
    CHECK(StateSpace::enumerate(graphs::make(3, graphs::complete(3), 2)).max_activity() == 2);
}

TEST_CASE("state distance counts channel changes twice") {
    CHECK(state_distance(st({1, 0}), st({1, 0})) == 0);
    CHECK(state_distance(st({1, 0}), st({0, 0})) == 1);
    CHECK(state_distance(st({1, 2}), st({2, 1})) == 4);
    CHECK(state_distance(st({1, 0, 2}), st({0, 0, 1})) == 3);
}

TEST_CASE("transitions are exactly the distance-one feasible pairs") {
    const std::vector<MultiChannelNetwork> nets = {
        graphs::make(4, graphs::cycle(4)),
        graphs::make(2, graphs::complete(2), 2),
        graphs::make(3, graphs::complete(3), 2),
    };
    for (const auto& net : nets) {
        const auto space = StateSpace::enumerate(net);
        const auto reference = oracle::enumerate_states(net);
        const auto q = oracle::rate_matrix(net, reference, net.rates.nu);
        for (std::size_t s = 0; s < space.size(); ++s) {
            std::vector<char> seen(space.size(), 0);
            for (const auto& t : space.transitions(s)) {
                seen[t.target] = 1;
                CHECK(space.state_distance(s, t.target) == 1);
                // activation moves increase activity by one
                const int diff = space.activity(t.target) - space.activity(s);
                CHECK(diff == (t.activation ? 1 : -1));
            }
            for (std::size_t y = 0; y < space.size(); ++y) {
                CHECK(static_cast<bool>(seen[y]) == (q[s][y] > 0));
            }
        }
    }
}

TEST_CASE("uniformized chain matches the analytical form") {
    const auto space = StateSpace::enumerate(graphs::make(2, graphs::complete(2), 1, 1.0));
    const auto chain = uniformized_matrix(space, 1.0);
    CHECK(chain.q_max == doctest::Approx(2.0));
    const auto s00 = *space.index_of(st({0, 0}));
    const auto s10 = *space.index_of(st({1, 0}));
    // P(10 -> 00) = 1/2 and P(00 -> 10) = 1/2 at nu = 1
    const auto moves10 = space.transitions(s10);
    REQUIRE(moves10.size() == 1);
    CHECK(chain.prob(s10, 0) == doctest::Approx(0.5));
    const auto moves00 = space.transitions(s00);
    REQUIRE(moves00.size() == 2);
    CHECK(chain.prob(s00, 0) == doctest::Approx(0.5));
}

TEST_CASE("activation probability is 1/(CN) independent of nu") {
    const auto space = StateSpace::enumerate(graphs::make(4, graphs::cycle(4), 2));
    for (double nu : {2.0, 100.0, 1e4}) {
        const auto chain = uniformized_matrix(space, nu);
        const auto empty = *space.index_of(st({0, 0, 0, 0}));
        const auto moves = space.transitions(empty);
        for (std::size_t k = 0; k < moves.size(); ++k) {
            CHECK(chain.prob(empty, k) == doctest::Approx(1.0 / 8).epsilon(1e-12));
        }
    }
}

TEST_CASE("uniformized rows sum to one") {
    const std::vector<MultiChannelNetwork> nets = {
        graphs::make(4, graphs::cycle(4), 2),
        graphs::make(3, graphs::complete(3), 3),
        graphs::make_weighted(3, graphs::path(3), {{1.0}, {2.5}, {0.5}}),
    };
    for (const auto& net : nets) {
        const auto space = StateSpace::enumerate(net);
        for (double nu : {0.25, 1.0, 50.0}) {
            const auto chain = uniformized_matrix(space, nu);
            for (std::size_t s = 0; s < space.size(); ++s) {
                double row = chain.self_prob[s];
                for (std::size_t k = 0; k < space.transitions(s).size(); ++k) {
                    row += chain.prob(s, k);
                }
                CHECK(std::abs(row - 1.0) < 1e-12);
                CHECK(chain.self_prob[s] >= -1e-15);
            }
        }
    }
}

TEST_CASE("weighted activity drives dominance for heterogeneous rates") {
    // middle node outweighs the two endpoints together
    const auto space =
        StateSpace::enumerate(graphs::make_weighted(3, graphs::path(3), {{1.0}, {3.0}, {1.0}}));
    CHECK(space.max_weighted_activity() == doctest::Approx(3.0));
    REQUIRE(space.dominant_states().size() == 1);
    CHECK(space.state(space.dominant_states()[0]) == st({0, 1, 0}));
    CHECK(space.max_activity() == 2);  // plain activity still counts nodes
}

TEST_CASE("per-channel conflict graphs constrain each channel separately") {
    // channel 1 forbids the path pairs, channel 2 only the endpoints
    const auto net = parse_network_text(R"({
        "num_nodes": 3, "num_channels": 2,
        "edges": {"per_channel": [[[0,1],[1,2]], [[0,2]]]},
        "rates": {"kind": "homogeneous", "nu": 5.0}
    })");
    CHECK_FALSE(net.shared_interference);
    const auto space = StateSpace::enumerate(net);
    const auto reference = oracle::enumerate_states(net);
    REQUIRE(space.size() == reference.size());
    for (std::size_t s = 0; s < space.size(); ++s) CHECK(space.state(s) == reference[s]);
    // (1,1,?) infeasible on channel 1, (2,?,2) infeasible on channel 2
    CHECK_FALSE(space.index_of({1, 1, 0}).has_value());
    CHECK(space.index_of({2, 2, 2}).has_value() == false);  // 0-2 conflict on channel 2
    CHECK(space.index_of({2, 2, 0}).has_value());
    CHECK(space.index_of({1, 2, 1}).has_value());
    CHECK_THROWS_AS(net.with_channels(3), InputError);
}

TEST_CASE("state cap refuses with the (C+1)^N bound in the message") {
    EdgeSet edges;
    for (int i = 0; i + 1 < 30; ++i) edges.emplace_back(i, i + 1);
    try {
        StateSpace::enumerate(graphs::make(30, edges));
        FAIL("expected CapExceeded");
    } catch (const CapExceeded& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1073741824") != std::string::npos);  // 2^30
    }
    // an explicit cap admits the same instance
    const auto space = StateSpace::enumerate(graphs::make(20, graphs::path(20)),
                                             std::uint64_t{1} << 21);
    CHECK(space.size() == 17711);  // Fibonacci F(22)
}
