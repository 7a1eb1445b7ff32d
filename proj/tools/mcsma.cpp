// mcsma: analysis and simulation of multi-channel CSMA random-access
// networks. See README.md for the file formats and examples.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mcsma/analysis.hpp"
#include "mcsma/graph_algos.hpp"
#include "mcsma/json_io.hpp"
#include "mcsma/manifest.hpp"
#include "mcsma/simulator.hpp"
#include "mcsma/verify.hpp"
#include "mcsma/virtual_network.hpp"

using namespace mcsma;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitCapExceeded = 3;

struct CommonFlags {
    std::string input;
    std::string output;
    std::uint64_t cap = kDefaultStateCap;
    std::uint64_t seed = 0;
    std::vector<double> nu_grid = {1e2, 1e3, 1e4};
    std::string nu_grid_text = "1e2,1e3,1e4";
    int channels = 0;  // 0: keep the file's channel count
    double nu = 0;     // 0: keep the file's nu
};

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) grid.push_back(std::stod(part));
    return grid;
}

void emit(const std::string& output, const json& doc) {
    const std::string text = doc.dump(2) + "\n";
    if (output.empty() || output == "-") {
        std::cout << text;
    } else {
        std::ofstream out(output);
        if (!out) throw InputError("cannot write output file: " + output);
        out << text;
    }
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write CSV file: " + path);
    out << header << "\n";
    out.precision(17);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << row[i];
        }
        out << "\n";
    }
}

MultiChannelNetwork load_network(const CommonFlags& flags) {
    auto net = parse_network(flags.input);
    if (flags.channels > 0 && flags.channels != net.num_channels) {
        net = net.with_channels(flags.channels);
    }
    if (flags.nu > 0) net = net.with_nu(flags.nu);
    return net;
}

json grid_config(const CommonFlags& flags) {
    return {{"cap", flags.cap},
            {"seed", flags.seed},
            {"nu_grid", flags.nu_grid},
            {"channels", flags.channels},
            {"nu", flags.nu}};
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_grid = true) {
    cmd->add_option("file", flags.input, "network description file (JSON)")->required();
    cmd->add_option("--output", flags.output, "write the JSON report here instead of stdout");
    cmd->add_option("--cap", flags.cap, "state-count cap for enumeration");
    cmd->add_option("--seed", flags.seed, "seed recorded in the manifest / used by sampling");
    cmd->add_option("--channels", flags.channels,
                    "override the channel count (shared interference only)");
    cmd->add_option("--nu", flags.nu, "override the activation scale nu");
    if (with_grid) {
        cmd->add_option("--nu-grid", flags.nu_grid_text, "comma-separated nu grid");
    }
}

int cmd_analyze(const CommonFlags& flags, double epsilon, const std::string& emit_virtual,
                bool with_hitting) {
    const auto net = load_network(flags);
    const auto space = StateSpace::enumerate(net, flags.cap);
    AnalyzeOptions options;
    options.nu_grid = flags.nu_grid;
    options.epsilon = epsilon;
    const auto report = analyze(space, options);

    json config = grid_config(flags);
    config["epsilon"] = epsilon;
    const auto manifest = make_manifest("analyze", flags.input, flags.seed, config);

    json doc;
    doc["manifest"] = manifest.to_json();
    doc["report"] = to_json(report);
    if (with_hitting && report.dominant_count >= 2) {
        json table = json::array();
        const auto& dom = space.dominant_states();
        for (std::size_t d = 0; d < dom.size(); ++d) {
            StateSet target;
            for (std::size_t o = 0; o < dom.size(); ++o) {
                if (o != d) target.push_back(dom[o]);
            }
            const auto fit = hitting_exponent(space, dom[d], target, flags.nu_grid);
            json row;
            row["from_dominant"] = d;
            row["fit"] = to_json(fit);
            table.push_back(row);
        }
        doc["report"]["hitting"] = table;
    }
    if (!emit_virtual.empty()) {
        emit(emit_virtual, virtual_graph_to_json(build_virtual(net)));
    }
    emit(flags.output, doc);
    return kExitOk;
}

int cmd_dominants(const CommonFlags& flags) {
    const auto net = load_network(flags);
    const auto space = StateSpace::enumerate(net, flags.cap);
    json doc;
    doc["manifest"] =
        make_manifest("dominants", flags.input, flags.seed, grid_config(flags)).to_json();
    json report;
    report["A"] = space.max_activity();
    if (!space.homogeneous()) report["A_weighted"] = space.max_weighted_activity();
    json doms = json::array();
    for (auto d : space.dominant_states()) {
        json arr = json::array();
        for (auto v : space.state(d)) arr.push_back(static_cast<int>(v));
        doms.push_back(arr);
    }
    report["dominants"] = doms;
    report["count"] = space.dominant_states().size();
    doc["report"] = report;
    emit(flags.output, doc);
    return kExitOk;
}

int cmd_starvation(const CommonFlags& flags) {
    const auto net = load_network(flags);
    const auto space = StateSpace::enumerate(net, flags.cap);
    const auto starvation = starvation_indices(space);
    const auto gamma = gamma_index(space);
    json doc;
    doc["manifest"] =
        make_manifest("starvation", flags.input, flags.seed, grid_config(flags)).to_json();
    json report = to_json(starvation, space.num_nodes());
    const bool integral = space.homogeneous();
    report["gamma"] =
        gamma ? (integral ? json(std::llround(*gamma)) : json(*gamma)) : json(nullptr);
    json delta = json::array();
    for (const auto& row : dominant_delta_matrix(space)) {
        json r = json::array();
        for (double v : row) r.push_back(integral ? json(std::llround(v)) : json(v));
        delta.push_back(r);
    }
    report["delta_matrix"] = delta;
    doc["report"] = report;
    emit(flags.output, doc);
    return kExitOk;
}

int cmd_hitting(const CommonFlags& flags, const std::string& from, int from_dominant,
                const std::string& to, const std::string& csv) {
    const auto net = load_network(flags);
    const auto space = StateSpace::enumerate(net, flags.cap);
    const auto& dom = space.dominant_states();

    std::size_t start;
    if (!from.empty()) {
        const auto x = parse_state(from, net.num_nodes, net.num_channels);
        const auto idx = space.index_of(x);
        if (!idx) throw InputError("--from state is not feasible");
        start = *idx;
    } else {
        if (from_dominant < 0 || static_cast<std::size_t>(from_dominant) >= dom.size()) {
            throw InputError("--from-dominant index out of range (have " +
                             std::to_string(dom.size()) + " dominant states)");
        }
        start = dom[from_dominant];
    }

    StateSet target;
    if (!to.empty()) {
        std::stringstream ss(to);
        std::string part;
        while (std::getline(ss, part, ';')) {
            const auto x = parse_state(part, net.num_nodes, net.num_channels);
            const auto idx = space.index_of(x);
            if (!idx) throw InputError("--to state is not feasible: " + part);
            target.push_back(*idx);
        }
    } else {
        for (auto d : dom) {
            if (d != start) target.push_back(d);
        }
        if (target.empty()) throw InputError("no dominant target states; pass --to");
    }

    const auto fit = hitting_exponent(space, start, target, flags.nu_grid);
    if (!csv.empty()) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < fit.nu_grid.size(); ++i) {
            rows.push_back({fit.nu_grid[i], fit.values[i], fit.log_nu_values[i]});
        }
        write_csv(csv, "nu,value,log_nu_value", rows);
    }
    json config = grid_config(flags);
    config["from"] = from;
    config["from_dominant"] = from_dominant;
    config["to"] = to;
    json doc;
    doc["manifest"] = make_manifest("hitting", flags.input, flags.seed, config).to_json();
    doc["report"] = to_json(fit);
    emit(flags.output, doc);
    return kExitOk;
}

int cmd_mixing(const CommonFlags& flags, double epsilon, const std::string& csv) {
    const auto net = load_network(flags);
    const auto space = StateSpace::enumerate(net, flags.cap);
    const auto report = mixing_bound(space, flags.nu_grid, epsilon);
    json config = grid_config(flags);
    config["epsilon"] = epsilon;
    json doc;
    doc["manifest"] = make_manifest("mixing", flags.input, flags.seed, config).to_json();
    doc["report"] = report ? to_json(*report) : json(nullptr);
    if (report && !csv.empty()) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < report->nu_grid.size(); ++i) {
            rows.push_back({report->nu_grid[i], report->lower_bound[i],
                            std::log(report->lower_bound[i]) / std::log(report->nu_grid[i])});
        }
        write_csv(csv, "nu,value,log_nu_value", rows);
    }
    emit(flags.output, doc);
    return kExitOk;
}

int cmd_simulate(const CommonFlags& flags, SimConfig sim, const std::string& mode,
                 const std::string& backoff, const std::string& transmit,
                 const std::string& event_log_path, const std::string& hit_from,
                 const std::string& hit_target) {
    auto net = load_network(flags);
    sim.seed = flags.seed;
    sim.backoff = Distribution::parse(backoff);
    sim.transmit = Distribution::parse(transmit);
    if (mode == "exact") {
        sim.mode = SimConfig::Mode::CtmcExact;
    } else if (mode == "event") {
        sim.mode = SimConfig::Mode::EventDriven;
    } else {
        throw InputError("--mode must be 'exact' or 'event'");
    }
    if (net.rates.homogeneous() && net.rates.nu >= 1e4) {
        std::cerr << "note: at nu >= 1e4 barrier crossings beyond exponent 2 are "
                     "impractical to sample; prefer the exact solver (hitting command)\n";
    }

    json config = grid_config(flags);
    config["replicas"] = sim.replicas;
    config["horizon"] = sim.horizon;
    config["max_events"] = sim.max_events;
    config["mode"] = mode;
    config["backoff"] = backoff;
    config["transmit"] = transmit;

    json doc;
    json report;
    if (!hit_from.empty()) {
        if (hit_target.empty()) throw InputError("--hit-target is required with --hit-from");
        const auto start = parse_state(hit_from, net.num_nodes, net.num_channels);
        std::vector<ActivityState> target;
        std::stringstream ss(hit_target);
        std::string part;
        while (std::getline(ss, part, ';')) {
            target.push_back(parse_state(part, net.num_nodes, net.num_channels));
        }
        config["hit_from"] = hit_from;
        config["hit_target"] = hit_target;
        const auto estimate = estimate_hitting(net, start, target, net.rates.nu, sim);
        report = to_json(estimate);
    } else {
        // track per-state occupancy when the space is small enough
        std::optional<StateSpace> space;
        std::uint64_t bound = 1;
        for (int i = 0; i < net.num_nodes && bound <= 100000; ++i) {
            bound *= net.num_channels + 1;
        }
        if (bound <= 100000) space.emplace(StateSpace::enumerate(net, flags.cap));
        std::vector<EventRecord> log;
        const auto stats = simulate(net, space ? &*space : nullptr, sim,
                                    event_log_path.empty() ? nullptr : &log);
        if (!event_log_path.empty()) {
            std::ofstream out(event_log_path);
            if (!out) throw InputError("cannot write event log: " + event_log_path);
            out << "replica,time,node,channel,activation\n";
            out.precision(17);
            for (const auto& ev : log) {
                out << ev.replica << "," << ev.time << "," << ev.node << "," << ev.channel
                    << "," << (ev.activation ? 1 : 0) << "\n";
            }
        }
        report = to_json(stats);
    }
    doc["manifest"] = make_manifest("simulate", flags.input, flags.seed, config).to_json();
    doc["report"] = report;
    emit(flags.output, doc);
    return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, int c_max) {
    if (c_max < 1) throw InputError("--c-max must be at least 1");
    const auto net = load_network(flags);
    if (!net.shared_interference) {
        throw InputError("sweep-channels requires shared interference");
    }
    if (!net.rates.homogeneous()) {
        throw InputError("sweep-channels requires the homogeneous rate model");
    }

    json rows = json::array();
    std::vector<long long> a_values;
    std::vector<std::optional<double>> jains, upsilons;
    // structural caps for the expensive dominant-pair analysis
    constexpr std::size_t kDeltaDominantLimit = 128;
    constexpr std::size_t kDeltaStateLimit = 200000;
    for (int c = 1; c <= c_max; ++c) {
        json row;
        row["C"] = c;
        try {
            const auto space = StateSpace::enumerate(net.with_channels(c), flags.cap);
            const long long a = space.max_activity();
            a_values.push_back(a);
            row["A"] = a;
            row["theta"] = aggregate_throughput(space);
            row["states"] = space.size();
            row["dominant_count"] = space.dominant_states().size();
            const auto jain = jain_index(space);
            row["jain"] = jain ? json(*jain) : json(nullptr);
            jains.push_back(jain);
            if (space.dominant_states().size() <= kDeltaDominantLimit &&
                space.size() <= kDeltaStateLimit) {
                const auto gamma = gamma_index(space);
                const auto starv = starvation_indices(space);
                row["gamma"] = gamma ? json(*gamma) : json(nullptr);
                row["upsilon"] = starv.network ? json(*starv.network) : json(nullptr);
                upsilons.push_back(starv.network);
            } else {
                row["gamma"] = "skipped";
                row["upsilon"] = "skipped";
                upsilons.push_back(std::nullopt);
            }
        } catch (const CapExceeded& e) {
            row["error"] = std::string("cap: ") + e.what();
            jains.push_back(std::nullopt);
            upsilons.push_back(std::nullopt);
        }
        rows.push_back(row);
    }

    // Theta must be non-increasing; a violation falsifies the theory
    // and is reported as an internal error.
    std::string internal_error;
    for (std::size_t i = 0; i + 1 < a_values.size(); ++i) {
        const auto c = static_cast<long long>(i) + 1;
        if (a_values[i + 1] * c > a_values[i] * (c + 1)) {
            internal_error = "aggregate throughput increased from C=" + std::to_string(c) +
                             " to C=" + std::to_string(c + 1);
        }
    }
    json findings = json::array();
    auto non_monotone = [](const std::vector<std::optional<double>>& seq) {
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
            if (seq[i] && seq[i + 1] && *seq[i + 1] > *seq[i] + 1e-12) return true;
        }
        return false;
    };
    if (non_monotone(jains)) findings.push_back("Jain index is not monotone in C");
    if (non_monotone(upsilons)) findings.push_back("starvation index is not monotone in C");

    json config = grid_config(flags);
    config["c_max"] = c_max;
    json doc;
    doc["manifest"] = make_manifest("sweep-channels", flags.input, flags.seed, config).to_json();
    doc["report"]["table"] = rows;
    doc["report"]["findings"] = findings;
    if (!internal_error.empty()) {
        doc["report"]["internal_error"] = internal_error;
        emit(flags.output, doc);
        return kExitCheckFailure;
    }
    emit(flags.output, doc);
    return kExitOk;
}

int cmd_verify(const std::string& directory, const CommonFlags& flags, bool paper_figures) {
    VerifyOptions options;
    options.state_cap = flags.cap;
    options.nu_grid = flags.nu_grid;
    options.include_paper_figures = paper_figures;
    const auto results = verify_corpus(directory, options);
    std::size_t failures = 0;
    json rows = json::array();
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.instance << " :: " << r.check;
        if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << "\n";
        if (!r.pass) ++failures;
        rows.push_back({{"instance", r.instance},
                        {"check", r.check},
                        {"pass", r.pass},
                        {"detail", r.detail}});
    }
    std::cout << (failures == 0 ? "all checks passed"
                                : std::to_string(failures) + " check(s) failed")
              << " (" << results.size() << " total)\n";
    if (!flags.output.empty()) {
        json config = grid_config(flags);
        config["paper_figures"] = paper_figures;
        json doc;
        doc["manifest"] = make_manifest("verify", "", flags.seed, config).to_json();
        doc["report"]["checks"] = rows;
        doc["report"]["failures"] = failures;
        emit(flags.output, doc);
    }
    return failures == 0 ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis and simulation of multi-channel CSMA random-access networks"};
    app.require_subcommand(1);

    CommonFlags flags;
    double epsilon = 0.25;
    std::string emit_virtual;
    bool with_hitting = false;

    auto* analyze_cmd = app.add_subcommand("analyze", "full analytical report");
    add_common(analyze_cmd, flags);
    analyze_cmd->add_option("--epsilon", epsilon, "epsilon of the mixing bound (0, 1/2)");
    analyze_cmd->add_option("--emit-virtual", emit_virtual,
                            "also write the virtual conflict graph G* to this path");
    analyze_cmd->add_flag("--with-hitting", with_hitting,
                          "include exact dominant-to-dominant hitting times per nu");

    auto* dominants_cmd = app.add_subcommand("dominants", "dominant states and A(C)");
    CommonFlags dom_flags;
    add_common(dominants_cmd, dom_flags, false);

    auto* starvation_cmd = app.add_subcommand("starvation", "starvation indices");
    CommonFlags starv_flags;
    add_common(starvation_cmd, starv_flags, false);

    auto* hitting_cmd =
        app.add_subcommand("hitting", "exact expected hitting times over a nu grid");
    CommonFlags hit_flags;
    std::string hit_from_state, hit_to;
    int hit_from_dominant = 0;
    std::string hit_csv;
    add_common(hitting_cmd, hit_flags);
    hitting_cmd->add_option("--from", hit_from_state, "start state, e.g. '1,0,1,0'");
    hitting_cmd->add_option("--from-dominant", hit_from_dominant,
                            "start from the k-th dominant state (default 0)");
    hitting_cmd->add_option("--to", hit_to,
                            "target states, ';'-separated (default: other dominants)");
    hitting_cmd->add_option("--csv", hit_csv, "write a nu,value,log_nu_value table here");

    auto* mixing_cmd =
        app.add_subcommand("mixing", "conductance lower bound for the mixing time");
    CommonFlags mix_flags;
    double mix_epsilon = 0.25;
    std::string mix_csv;
    add_common(mixing_cmd, mix_flags);
    mixing_cmd->add_option("--epsilon", mix_epsilon, "epsilon of the mixing bound (0, 1/2)");
    mixing_cmd->add_option("--csv", mix_csv, "write a nu,value,log_nu_value table here");

    auto* simulate_cmd = app.add_subcommand("simulate", "stochastic simulation");
    CommonFlags sim_flags;
    SimConfig sim;
    std::string sim_mode = "exact", sim_backoff = "exp", sim_transmit = "exp";
    std::string event_log_path, sim_hit_from, sim_hit_target;
    add_common(simulate_cmd, sim_flags, false);
    simulate_cmd->add_option("--replicas", sim.replicas, "independent replicas");
    simulate_cmd->add_option("--horizon", sim.horizon, "simulated time per replica");
    simulate_cmd->add_option("--max-events", sim.max_events, "per-replica event cap");
    simulate_cmd->add_option("--mode", sim_mode, "exact | event");
    simulate_cmd->add_option("--backoff", sim_backoff, "exp | det | unif:a,b");
    simulate_cmd->add_option("--transmit", sim_transmit, "exp | det | unif:a,b");
    simulate_cmd->add_option("--event-log", event_log_path, "write a CSV event log here");
    simulate_cmd->add_option("--hit-from", sim_hit_from,
                             "estimate a hitting time from this state instead");
    simulate_cmd->add_option("--hit-target", sim_hit_target, "';'-separated hitting targets");

    auto* sweep_cmd =
        app.add_subcommand("sweep-channels", "per-C table of throughput and indices");
    CommonFlags sweep_flags;
    int c_max = 1;
    add_common(sweep_cmd, sweep_flags, false);
    sweep_cmd->add_option("--c-max", c_max, "largest channel count")->required();

    auto* verify_cmd = app.add_subcommand("verify", "run the invariant suites over a corpus");
    CommonFlags verify_flags;
    std::string corpus_dir;
    bool paper_figures = false;
    verify_cmd->add_option("dir", corpus_dir, "corpus directory")->required();
    verify_cmd->add_option("--output", verify_flags.output, "also write a JSON summary here");
    verify_cmd->add_option("--cap", verify_flags.cap, "state-count cap");
    verify_cmd->add_option("--nu-grid", verify_flags.nu_grid_text, "comma-separated nu grid");
    verify_cmd->add_flag("--paper-figures", paper_figures,
                         "include the paper_figures/ subdirectory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        json err;
        err["error"] = {{"type", "input"}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return kExitInputError;
    }

    try {
        if (analyze_cmd->parsed()) {
            flags.nu_grid = parse_grid(flags.nu_grid_text);
            return cmd_analyze(flags, epsilon, emit_virtual, with_hitting);
        }
        if (dominants_cmd->parsed()) return cmd_dominants(dom_flags);
        if (starvation_cmd->parsed()) return cmd_starvation(starv_flags);
        if (hitting_cmd->parsed()) {
            hit_flags.nu_grid = parse_grid(hit_flags.nu_grid_text);
            return cmd_hitting(hit_flags, hit_from_state, hit_from_dominant, hit_to, hit_csv);
        }
        if (mixing_cmd->parsed()) {
            mix_flags.nu_grid = parse_grid(mix_flags.nu_grid_text);
            return cmd_mixing(mix_flags, mix_epsilon, mix_csv);
        }
        if (simulate_cmd->parsed()) {
            return cmd_simulate(sim_flags, sim, sim_mode, sim_backoff, sim_transmit,
                                event_log_path, sim_hit_from, sim_hit_target);
        }
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, c_max);
        if (verify_cmd->parsed()) {
            verify_flags.nu_grid = parse_grid(verify_flags.nu_grid_text);
            return cmd_verify(corpus_dir, verify_flags, paper_figures);
        }
    } catch (const CapExceeded& e) {
        json err;
        err["error"] = {{"type", "cap"}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return kExitCapExceeded;
    } catch (const InputError& e) {
        json err;
        err["error"] = {{"type", "input"}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        json err;
        err["error"] = {{"type", "internal"}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return kExitCheckFailure;
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"type", "internal"}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return kExitCheckFailure;
    }
    return kExitOk;
}
