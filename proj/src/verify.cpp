#include "mcsma/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "json.hpp"

#include "mcsma/analysis.hpp"
#include "mcsma/graph_algos.hpp"
#include "mcsma/virtual_network.hpp"

namespace mcsma {

namespace {

using nlohmann::json;

constexpr double kRelTol = 1e-12;

double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

struct InstanceContext {
    std::string name;
    MultiChannelNetwork net;
    json expected;  // may be null
    const VerifyOptions* options;
    std::map<int, StateSpace> spaces;
    std::vector<CheckResult> results;

    const StateSpace& space(int channels) {
        auto it = spaces.find(channels);
        if (it == spaces.end()) {
            auto net_c = channels == net.num_channels ? net : net.with_channels(channels);
            it = spaces.emplace(channels, StateSpace::enumerate(std::move(net_c),
                                                               options->state_cap)).first;
        }
        return it->second;
    }

    void record(const std::string& check, bool pass, const std::string& detail = "") {
        results.push_back({name, check, pass, detail});
    }
};

void check_graph_invariants(InstanceContext& ctx) {
    const auto& net = ctx.net;
    std::string fail;
    for (int c = 1; c <= net.num_channels && fail.empty(); ++c) {
        const auto& edges = net.edges(c);
        const int alpha = independence_number(edges, net.num_nodes, 64);
        const int chi = chromatic_number(edges, net.num_nodes, 64);
        const int cstar = disjoint_mis_count(edges, net.num_nodes, 64);
        if (alpha < 1 || chi < 1 || cstar < 1) fail = "degenerate invariant on channel " +
                                                      std::to_string(c);
        else if (chi > net.num_nodes) fail = "chi exceeds N";
        else if (alpha * chi < net.num_nodes) fail = "alpha*chi < N";
        else if (cstar * alpha > net.num_nodes) fail = "cstar*alpha > N";
        if (net.shared_interference) break;
    }
    ctx.record("graph-invariants", fail.empty(), fail);
}

void check_throughput_identities(InstanceContext& ctx) {
    const auto& net = ctx.net;
    if (!net.shared_interference || !net.rates.homogeneous()) {
        ctx.record("throughput-identities", true, "skipped: needs shared homogeneous network");
        return;
    }
    const auto& edges = net.edges(1);
    const int n = net.num_nodes;
    const int alpha = independence_number(edges, n, 64);
    const int chi = chromatic_number(edges, n, 64);
    const int cstar = disjoint_mis_count(edges, n, 64);

    std::string fail;
    std::vector<long long> a_of_c;  // A(C) for C = 1..chi+1
    for (int c = 1; c <= chi + 1 && fail.empty(); ++c) {
        long long a = -1;
        bool overflow = true;
        // enumerate when the bound allows, otherwise fall back to the
        // virtual-network independence number (the two routes agree by
        // the bijection with G* independent sets)
        std::uint64_t bound = 1;
        overflow = false;
        for (int i = 0; i < n && !overflow; ++i) {
            if (bound > ctx.options->state_cap / (static_cast<std::uint64_t>(c) + 1)) {
                overflow = true;
            } else {
                bound *= c + 1;
            }
        }
        if (!overflow && bound <= ctx.options->state_cap) {
            a = ctx.space(c).max_activity();
        } else if (n * c <= 64) {
            const auto vg = build_virtual(net.with_channels(c));
            a = independence_number(vg.edges, vg.num_virtual_nodes, 64);
        } else {
            ctx.record("throughput-identities", true,
                       "skipped at C=" + std::to_string(c) + ": cap");
            return;
        }
        a_of_c.push_back(a);
        if (c == 1 && a != alpha) fail = "A(1) != alpha";
        if (c <= cstar && a != static_cast<long long>(c) * alpha) {
            fail = "A(C) != C*alpha at C=" + std::to_string(c) + " <= C*";
        }
        if (c >= chi && a != n) fail = "A(C) != N at C=" + std::to_string(c) + " >= chi";
    }
    // Theta non-increasing via cross-multiplication (exact integers)
    for (std::size_t c = 1; c + 1 <= a_of_c.size() && fail.empty(); ++c) {
        if (a_of_c[c] * static_cast<long long>(c) >
            a_of_c[c - 1] * static_cast<long long>(c + 1)) {
            fail = "Theta increases from C=" + std::to_string(c);
        }
    }
    ctx.record("throughput-identities", fail.empty(), fail);
}

void check_equivalence_suite(InstanceContext& ctx) {
    const auto& net = ctx.net;
    if (net.num_nodes * net.num_channels > 64) {
        ctx.record("virtual-equivalence", true, "skipped: G* exceeds 64 nodes");
        return;
    }
    const auto report = check_equivalence(net, ctx.options->state_cap);
    if (!report.pass) {
        ctx.record("virtual-equivalence", false, report.first_mismatch);
        return;
    }
    // push the virtual stationary distribution through V and compare
    const auto vg = build_virtual(net);
    const auto& multi = ctx.space(net.num_channels);
    const StateSpace virt = StateSpace::enumerate(vg.as_single_channel(), ctx.options->state_cap);
    const auto pi_multi = stationary_distribution(multi, net.rates.nu);
    const auto pi_virt = stationary_distribution(virt, net.rates.nu);
    double worst = 0;
    for (std::size_t s = 0; s < multi.size(); ++s) {
        const auto vstate = from_multichannel(vg, multi.state(s));
        const auto vidx = virt.index_of(vstate);
        if (!vidx) {
            ctx.record("virtual-equivalence", false, "pushforward missed a virtual state");
            return;
        }
        worst = std::max(worst, rel_diff(pi_multi[s], pi_virt[*vidx]));
    }
    ctx.record("virtual-equivalence", worst <= kRelTol,
               worst <= kRelTol ? "" : "pushforward disagrees, rel " + std::to_string(worst));
}

void check_state_count(InstanceContext& ctx) {
    const auto& net = ctx.net;
    if (net.num_nodes * net.num_channels > 64) {
        ctx.record("state-count-reference", true, "skipped: G* exceeds 64 nodes");
        return;
    }
    const auto vg = build_virtual(net);
    const auto count =
        count_independent_sets(vg.edges, vg.num_virtual_nodes, ctx.options->state_cap);
    const auto& space = ctx.space(net.num_channels);
    ctx.record("state-count-reference", count == space.size(),
               count == space.size() ? ""
                                     : "enumerated " + std::to_string(space.size()) +
                                           " vs reference " + std::to_string(count));
}

void check_transition_structure(InstanceContext& ctx) {
    const auto& space = ctx.space(ctx.net.num_channels);
    std::string fail;
    for (std::size_t s = 0; s < space.size() && fail.empty(); ++s) {
        for (const auto& t : space.transitions(s)) {
            const auto u = static_cast<std::size_t>(t.target);
            if (std::abs(space.activity(s) - space.activity(u)) != 1) {
                fail = "activity step != 1";
                break;
            }
            bool reverse = false;
            for (const auto& r : space.transitions(u)) {
                if (static_cast<std::size_t>(r.target) == s && r.node == t.node &&
                    r.channel == t.channel && r.activation != t.activation) {
                    reverse = true;
                    break;
                }
            }
            if (!reverse) {
                fail = "missing reverse transition";
                break;
            }
        }
    }
    if (fail.empty()) {
        // connectivity from the empty state
        const auto empty = space.index_of(ActivityState(ctx.net.num_nodes, 0));
        std::vector<char> seen(space.size(), 0);
        std::queue<std::size_t> queue;
        seen[*empty] = 1;
        queue.push(*empty);
        std::size_t reached = 0;
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop();
            ++reached;
            for (const auto& t : space.transitions(u)) {
                const auto v = static_cast<std::size_t>(t.target);
                if (!seen[v]) {
                    seen[v] = 1;
                    queue.push(v);
                }
            }
        }
        if (reached != space.size()) fail = "transition graph is disconnected";
    }
    ctx.record("transition-structure", fail.empty(), fail);
}

void check_detailed_balance(InstanceContext& ctx) {
    const auto& space = ctx.space(ctx.net.num_channels);
    const double nu = ctx.net.rates.nu;
    const auto pi = stationary_distribution(space, nu);
    const auto chain = uniformized_matrix(space, nu);
    double worst = 0, worst_row = 0;
    for (std::size_t s = 0; s < space.size(); ++s) {
        const auto moves = space.transitions(s);
        double row = chain.self_prob[s];
        for (std::size_t k = 0; k < moves.size(); ++k) {
            row += chain.prob(s, k);
            const auto u = static_cast<std::size_t>(moves[k].target);
            if (u < s) continue;  // each edge once
            const double fwd = pi[s] * chain.prob(s, k);
            // locate the reverse probability
            const auto back = space.transitions(u);
            for (std::size_t r = 0; r < back.size(); ++r) {
                if (static_cast<std::size_t>(back[r].target) == s &&
                    back[r].node == moves[k].node && back[r].channel == moves[k].channel) {
                    worst = std::max(worst, rel_diff(fwd, pi[u] * chain.prob(u, r)));
                    break;
                }
            }
        }
        worst_row = std::max(worst_row, std::abs(row - 1.0));
    }
    const bool pass = worst <= kRelTol && worst_row <= kRelTol;
    ctx.record("detailed-balance", pass,
               pass ? ""
                    : "detailed balance rel " + std::to_string(worst) + ", row defect " +
                          std::to_string(worst_row));
}

void check_ultrametric(InstanceContext& ctx) {
    const auto& space = ctx.space(ctx.net.num_channels);
    if (space.size() > ctx.options->ultrametric_state_limit) {
        ctx.record("ultrametric", true, "skipped: space above limit");
        return;
    }
    const std::size_t n = space.size();
    std::vector<std::vector<double>> delta(n);
    for (std::size_t s = 0; s < n; ++s) {
        delta[s] = heights_from_source(space, s);
        delta[s][s] = 0.0;
    }
    std::string fail;
    for (std::size_t x = 0; x < n && fail.empty(); ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x != y && !(delta[x][y] > 0)) {
                fail = "positivity fails";
                break;
            }
            if (delta[x][y] != delta[y][x]) {
                fail = "symmetry fails";
                break;
            }
        }
    }
    for (std::size_t x = 0; x < n && fail.empty(); ++x) {
        for (std::size_t z = 0; z < n && fail.empty(); ++z) {
            const auto& dx = delta[x];
            const auto& dz = delta[z];
            for (std::size_t y = 0; y < n; ++y) {
                if (dx[y] > std::max(dx[z], dz[y])) {
                    fail = "ultrametric inequality fails";
                    break;
                }
            }
        }
    }
    ctx.record("ultrametric", fail.empty(), fail);
}

void check_starvation_order(InstanceContext& ctx) {
    const auto& space = ctx.space(ctx.net.num_channels);
    const auto upsilon = starvation_indices(space);
    const auto gamma = gamma_index(space);
    if (!upsilon.network || !gamma) {
        ctx.record("starvation-vs-gamma", true, "skipped: an index is undefined");
        return;
    }
    ctx.record("starvation-vs-gamma", *upsilon.network <= *gamma,
               *upsilon.network <= *gamma
                   ? ""
                   : "Upsilon " + std::to_string(*upsilon.network) + " > Gamma " +
                         std::to_string(*gamma));
}

void check_hitting_exponents(InstanceContext& ctx) {
    const auto& space = ctx.space(ctx.net.num_channels);
    const auto& dom = space.dominant_states();
    if (dom.size() < 2) {
        ctx.record("hitting-exponents", true, "skipped: single dominant state");
        return;
    }
    if (space.size() > ctx.options->exponent_state_limit) {
        ctx.record("hitting-exponents", true, "skipped: space above limit");
        return;
    }
    std::string fail;
    for (std::size_t d = 0; d < dom.size() && fail.empty(); ++d) {
        StateSet target;
        for (std::size_t o = 0; o < dom.size(); ++o) {
            if (o != d) target.push_back(dom[o]);
        }
        const double expected =
            communication_height(space, {dom[d]}, target) - 1.0;
        const auto fit = hitting_exponent(space, dom[d], target, ctx.options->nu_grid);
        if (std::abs(fit.slope - expected) > ctx.options->slope_tolerance) {
            fail = "slope " + std::to_string(fit.slope) + " vs Delta-1 = " +
                   std::to_string(expected) + " from dominant " + std::to_string(d);
        }
    }
    ctx.record("hitting-exponents", fail.empty(), fail);
}

void check_resistance_sandwich(InstanceContext& ctx) {
    const auto& space = ctx.space(ctx.net.num_channels);
    const auto& dom = space.dominant_states();
    if (dom.size() < 2 || space.size() > ctx.options->exponent_state_limit) {
        ctx.record("resistance-sandwich", true, "skipped");
        return;
    }
    // worst pair
    const auto delta = dominant_delta_matrix(space);
    std::size_t si = 0, sj = 1;
    double gamma = 0;
    for (std::size_t i = 0; i < dom.size(); ++i) {
        for (std::size_t j = i + 1; j < dom.size(); ++j) {
            if (delta[i][j] > gamma) {
                gamma = delta[i][j];
                si = i;
                sj = j;
            }
        }
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (double nu : ctx.options->nu_grid) {
        const auto r = resistances(space, nu, dom[si], {dom[sj]});
        const double ratio = r.effective / r.critical;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    ctx.record("resistance-sandwich", hi / lo < 10.0,
               hi / lo < 10.0 ? "" : "R/Psi spread " + std::to_string(hi / lo));
}

// Independent route for expected hitting times: dynamic-programming
// value iteration on the uniformized chain.
double value_iteration_hitting(const StateSpace& space, double nu, std::size_t start,
                               const std::vector<char>& in_target) {
    const auto chain = uniformized_matrix(space, nu);
    std::vector<double> h(space.size(), 0.0), next(space.size(), 0.0);
    double change = 1;
    std::size_t iter = 0;
    const std::size_t max_iter = 200'000'000 / std::max<std::size_t>(space.size(), 1);
    while (change > 1e-14 && iter < max_iter) {
        change = 0;
        for (std::size_t s = 0; s < space.size(); ++s) {
            if (in_target[s]) {
                next[s] = 0;
                continue;
            }
            double v = 1.0 + chain.self_prob[s] * h[s];
            const auto moves = space.transitions(s);
            for (std::size_t k = 0; k < moves.size(); ++k) {
                v += chain.prob(s, k) * h[moves[k].target];
            }
            next[s] = v;
            change = std::max(change, std::abs(v - h[s]) / std::max(1.0, std::abs(v)));
        }
        h.swap(next);
        ++iter;
    }
    return h[start] / chain.q_max;
}

void check_value_iteration(InstanceContext& ctx) {
    const auto& space = ctx.space(ctx.net.num_channels);
    if (space.size() > ctx.options->value_iteration_state_limit) {
        ctx.record("value-iteration", true, "skipped: space above limit");
        return;
    }
    const auto& dom = space.dominant_states();
    std::size_t start = dom.front();
    StateSet target;
    if (dom.size() >= 2) {
        target.assign(dom.begin() + 1, dom.end());
    } else {
        const auto empty = space.index_of(ActivityState(ctx.net.num_nodes, 0));
        if (*empty == start) {
            ctx.record("value-iteration", true, "skipped: trivial space");
            return;
        }
        target.push_back(*empty);
    }
    const double nu = 10.0;
    const auto exact = exact_hitting_time(space, nu, start, target);
    std::vector<char> in_target(space.size(), 0);
    for (auto t : target) in_target[t] = 1;
    const double vi = value_iteration_hitting(space, nu, start, in_target);
    const double diff = rel_diff(exact.expected_time, vi);
    ctx.record("value-iteration", diff <= 1e-8,
               diff <= 1e-8 ? "" : "solver vs iteration rel " + std::to_string(diff));
}

void check_expected_values(InstanceContext& ctx) {
    if (ctx.expected.is_null()) {
        ctx.record("expected-values", true, "no expected block");
        return;
    }
    const auto& exp = ctx.expected;
    const auto& net = ctx.net;
    std::string fail;

    auto check_int = [&](const char* key, long long actual) {
        if (fail.empty() && exp.contains(key) && exp[key].get<long long>() != actual) {
            fail = std::string(key) + ": expected " + exp[key].dump() + ", got " +
                   std::to_string(actual);
        }
    };
    check_int("alpha", independence_number(net.edges(1), net.num_nodes, 64));
    check_int("chi", chromatic_number(net.edges(1), net.num_nodes, 64));
    check_int("cstar", disjoint_mis_count(net.edges(1), net.num_nodes, 64));

    if (exp.contains("C") && fail.empty()) {
        for (const auto& [key, block] : exp["C"].items()) {
            const int c = std::stoi(key);
            const auto& space = ctx.space(c);
            if (block.contains("states") &&
                block["states"].get<std::size_t>() != space.size()) {
                fail = "C=" + key + " states: expected " + block["states"].dump() + ", got " +
                       std::to_string(space.size());
            }
            if (fail.empty() && block.contains("A") &&
                block["A"].get<int>() != space.max_activity()) {
                fail = "C=" + key + " A: expected " + block["A"].dump() + ", got " +
                       std::to_string(space.max_activity());
            }
            if (fail.empty() && block.contains("dominant_count") &&
                block["dominant_count"].get<std::size_t>() != space.dominant_states().size()) {
                fail = "C=" + key + " dominant_count mismatch";
            }
            if (fail.empty() && block.contains("gamma")) {
                const auto gamma = gamma_index(space);
                if (block["gamma"].is_null() != !gamma.has_value() ||
                    (gamma && rel_diff(block["gamma"].get<double>(), *gamma) > kRelTol)) {
                    fail = "C=" + key + " gamma mismatch";
                }
            }
            if (fail.empty() && block.contains("upsilon")) {
                const auto ups = starvation_indices(space);
                if (block["upsilon"].is_null() != !ups.network.has_value() ||
                    (ups.network &&
                     rel_diff(block["upsilon"].get<double>(), *ups.network) > kRelTol)) {
                    fail = "C=" + key + " upsilon mismatch";
                }
            }
            if (fail.empty() && block.contains("jain")) {
                const auto jain = jain_index(space);
                if (!jain || rel_diff(block["jain"].get<double>(), *jain) > 1e-9) {
                    fail = "C=" + key + " jain mismatch";
                }
            }
            if (fail.empty() && block.contains("delta_matrix")) {
                const auto delta = dominant_delta_matrix(space);
                const auto& want = block["delta_matrix"];
                if (want.size() != delta.size()) {
                    fail = "C=" + key + " delta_matrix size mismatch";
                } else {
                    for (std::size_t i = 0; i < delta.size() && fail.empty(); ++i) {
                        for (std::size_t j = 0; j < delta.size(); ++j) {
                            if (want[i][j].get<double>() != delta[i][j]) {
                                fail = "C=" + key + " delta_matrix[" + std::to_string(i) + "][" +
                                       std::to_string(j) + "]: expected " + want[i][j].dump() +
                                       ", got " + std::to_string(delta[i][j]);
                                break;
                            }
                        }
                    }
                }
            }
            if (!fail.empty()) break;
        }
    }
    ctx.record("expected-values", fail.empty(), fail);
}

}  // namespace

std::vector<CheckResult> verify_instance(const std::string& path, const VerifyOptions& options) {
    InstanceContext ctx;
    ctx.name = std::filesystem::path(path).stem().string();
    ctx.options = &options;
    ctx.net = parse_network(path);
    {
        std::ifstream in(path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const json doc = json::parse(buf.str());
        ctx.expected = doc.contains("expected") ? doc["expected"] : json(nullptr);
    }

    check_graph_invariants(ctx);
    check_throughput_identities(ctx);
    check_equivalence_suite(ctx);
    check_state_count(ctx);
    check_transition_structure(ctx);
    check_detailed_balance(ctx);
    check_ultrametric(ctx);
    check_starvation_order(ctx);
    check_hitting_exponents(ctx);
    check_resistance_sandwich(ctx);
    check_value_iteration(ctx);
    check_expected_values(ctx);
    return ctx.results;
}

std::vector<CheckResult> verify_corpus(const std::string& directory,
                                       const VerifyOptions& options) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory)) throw InputError("not a directory: " + directory);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path().string());
        }
    }
    if (options.include_paper_figures) {
        const fs::path figures = fs::path(directory) / "paper_figures";
        if (fs::is_directory(figures)) {
            for (const auto& entry : fs::directory_iterator(figures)) {
                if (entry.is_regular_file() && entry.path().extension() == ".json") {
                    files.push_back(entry.path().string());
                }
            }
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InputError("no instances found in " + directory);
    std::vector<CheckResult> all;
    for (const auto& f : files) {
        auto results = verify_instance(f, options);
        all.insert(all.end(), results.begin(), results.end());
    }
    return all;
}

}  // namespace mcsma
