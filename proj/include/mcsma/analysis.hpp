#pragma once

#include <optional>
#include <vector>

#include "mcsma/state_space.hpp"

namespace mcsma {

// Set of states by ordinal in a StateSpace.
using StateSet = std::vector<std::size_t>;

// pi_C at scale nu, computed in log space and normalized. Sums to 1.
std::vector<double> stationary_distribution(const StateSpace& space, double nu);

// Asymptotic aggregate throughput A(C)/C. Heterogeneous models are
// rejected (the identity only holds for homogeneous rates).
double aggregate_throughput(const StateSpace& space);

// Per-node throughput at finite nu: (1/C) sum_x pi(x) 1{x_i != 0}.
std::vector<double> node_throughput(const StateSpace& space, double nu);

// nu -> infinity limit of the per-node throughput: |S_C(i)| / (C |D_C|).
std::vector<double> asymptotic_node_throughput(const StateSpace& space);

// Jain's fairness index of the asymptotic throughput vector; nullopt
// when every node has zero asymptotic throughput.
std::optional<double> jain_index(const StateSpace& space);

// Communication height between two disjoint nonempty state sets: the
// min over connecting paths of the max landscape deficit along the
// path. Integer-valued for homogeneous models.
double communication_height(const StateSpace& space, const StateSet& from, const StateSet& to);

// Height of every state from a single source: delta[x] = Delta(s, x).
std::vector<double> heights_from_source(const StateSpace& space, std::size_t source);

// Pairwise heights between dominant states; zero diagonal.
std::vector<std::vector<double>> dominant_delta_matrix(const StateSpace& space);

struct StarvationReport {
    enum class NodeStatus { Defined, PermanentStarver, NeverStarves };
    std::vector<NodeStatus> status;  // per node
    std::vector<double> index;       // Upsilon_i, meaningful where Defined
    std::optional<double> network;   // Upsilon(C); nullopt when no node qualifies
};
StarvationReport starvation_indices(const StateSpace& space);

// Gamma(C): worst height between dominant pairs; nullopt when there is
// a single dominant state.
std::optional<double> gamma_index(const StateSpace& space);

struct HittingResult {
    double expected_time = 0;  // E tau (continuous time)
    double residual = 0;       // relative residual of the linear solve
};

// Expected first hitting time of `target` from `start`, by solving the
// first-step system on the uniformized chain and scaling by 1/q_max.
HittingResult exact_hitting_time(const StateSpace& space, double nu, std::size_t start,
                                 const StateSet& target);

struct ExponentFit {
    std::vector<double> nu_grid;
    std::vector<double> values;         // E tau per grid point
    std::vector<double> log_nu_values;  // log_nu of each value
    double slope = 0;                   // OLS slope of ln value vs ln nu
    double intercept = 0;
};

// Least-squares exponent of E tau across an ascending nu grid (> 1,
// at least 3 points).
ExponentFit hitting_exponent(const StateSpace& space, std::size_t start, const StateSet& target,
                             const std::vector<double>& nu_grid);

struct ResistanceResult {
    double effective = 0;  // R(x <-> A) = 1 / (pi(x) P_x(T_A < T_x^+))
    double critical = 0;   // Psi(x, A): minimax edge resistance over paths
};
ResistanceResult resistances(const StateSpace& space, double nu, std::size_t x,
                             const StateSet& target);

// Second-smallest decay rate of the reversible generator (spectral
// gap), computed on the symmetrized dense form.
double spectral_gap(const StateSpace& space, double nu);

struct MixingReport {
    double epsilon = 0;
    std::size_t source_dominant = 0;  // s of the maximizing pair
    std::size_t target_dominant = 0;  // s'
    double gamma_value = 0;
    StateSet bottleneck_set;   // S = {x : Delta(s, x) < Gamma}
    bool complemented = false; // true when S was swapped for its complement
    bool boundary_ok = false;  // all exit states of S at exactly A - Gamma + 1
    double boundary_level = 0; // A(C) - Gamma(C) + 1
    std::vector<double> nu_grid;
    std::vector<double> flow;          // Q(S, S^c) per nu
    std::vector<double> pi_S;          // pi(S) per nu
    std::vector<double> conductance;   // Phi(S) per nu
    std::vector<double> lower_bound;   // (1/2 - eps) / Phi(S) per nu
    double conductance_exponent = 0;   // OLS slope of ln Phi vs ln nu
    double bound_exponent = 0;         // OLS slope of the mixing-time bound
    std::vector<double> gap;           // spectral gap per nu (empty when skipped)
    double relaxation_exponent = 0;    // OLS slope of ln(1/gap); NaN when skipped
};

// Conductance lower-bound construction for the mixing time. nullopt
// when there is a single dominant state. The spectral gap column is
// filled only for spaces of at most gap_state_limit states.
std::optional<MixingReport> mixing_bound(const StateSpace& space,
                                         const std::vector<double>& nu_grid, double epsilon,
                                         std::size_t gap_state_limit = 600);

// Aggregate of all per-network indices, as emitted by the CLI.
struct AnalysisReport {
    bool weighted = false;
    int num_nodes = 0;
    int num_channels = 0;
    int A_C = 0;                  // max activity (states, not landscape)
    double A_weighted = 0;        // max landscape value
    std::size_t dominant_count = 0;
    std::vector<ActivityState> dominants;
    std::optional<double> theta;  // aggregate throughput (homogeneous only)
    std::vector<double> theta_per_node;  // empty for heterogeneous
    std::optional<double> jain;
    bool heights_skipped = false;  // dominant count above the option limit
    std::vector<std::vector<double>> delta_matrix;
    StarvationReport starvation;
    std::optional<double> gamma;
    std::optional<double> conductance_exponent;  // from mixing_bound on nu_grid
    std::vector<double> nu_grid;
};

struct AnalyzeOptions {
    std::vector<double> nu_grid = {1e2, 1e3, 1e4};
    double epsilon = 0.25;
    bool with_conductance = true;
    // the height matrix costs |D|^2 searches; skip it beyond this
    std::size_t max_height_dominants = 256;
};

AnalysisReport analyze(const StateSpace& space, const AnalyzeOptions& options = {});

}  // namespace mcsma
