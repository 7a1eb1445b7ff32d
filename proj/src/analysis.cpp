#include "mcsma/analysis.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace mcsma {

namespace {

double landscape(const StateSpace& space, std::size_t idx) {
    return space.weighted_activity(idx);
}

// Distinct landscape values, ascending.
std::vector<double> landscape_levels(const StateSpace& space) {
    std::vector<double> levels(space.size());
    for (std::size_t s = 0; s < space.size(); ++s) levels[s] = landscape(space, s);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    return levels;
}

// BFS within {z : landscape(z) >= level} from the admissible part of
// `from`; returns true as soon as `to_mark` is hit (when given).
bool level_connected(const StateSpace& space, const std::vector<std::size_t>& from,
                     const std::vector<char>& to_mark, double level,
                     std::vector<char>& visited) {
    std::fill(visited.begin(), visited.end(), 0);
    std::queue<std::size_t> queue;
    for (auto s : from) {
        if (landscape(space, s) >= level && !visited[s]) {
            if (to_mark[s]) return true;
            visited[s] = 1;
            queue.push(s);
        }
    }
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop();
        for (const auto& t : space.transitions(u)) {
            const auto v = static_cast<std::size_t>(t.target);
            if (visited[v] || landscape(space, v) < level) continue;
            if (to_mark[v]) return true;
            visited[v] = 1;
            queue.push(v);
        }
    }
    return false;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    if (intercept) *intercept = my - slope * mx;
    return slope;
}

void validate_nu_grid(const std::vector<double>& grid) {
    if (grid.size() < 3) throw InputError("nu grid needs at least 3 points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= 1.0) throw InputError("nu grid values must exceed 1");
        if (i > 0 && grid[i] <= grid[i - 1]) throw InputError("nu grid must be ascending");
    }
}

// Sparse solve of (I - P_restricted) h = b over the states where
// keep[s] != 0, with iterative refinement. Returns the solution over
// kept states, in kept order, and the final relative residual.
struct RestrictedSolve {
    std::vector<double> solution;        // indexed by local ordinal
    std::vector<std::int64_t> local_of;  // global -> local, -1 when dropped
    double residual = 0;
};

RestrictedSolve solve_restricted(const StateSpace& space, const UniformizedChain& chain,
                                 const std::vector<char>& keep,
                                 const std::vector<double>& rhs_global) {
    RestrictedSolve out;
    out.local_of.assign(space.size(), -1);
    std::vector<std::size_t> global_of;
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (keep[s]) {
            out.local_of[s] = static_cast<std::int64_t>(global_of.size());
            global_of.push_back(s);
        }
    }
    const auto n = static_cast<Eigen::Index>(global_of.size());
    if (n == 0) return out;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(global_of.size() * 4);
    Eigen::VectorXd b(n);
    for (Eigen::Index row = 0; row < n; ++row) {
        const std::size_t s = global_of[row];
        triplets.emplace_back(row, row, 1.0 - chain.self_prob[s]);
        const auto moves = space.transitions(s);
        for (std::size_t k = 0; k < moves.size(); ++k) {
            const auto target = static_cast<std::size_t>(moves[k].target);
            if (keep[target]) {
                triplets.emplace_back(row, out.local_of[target], -chain.prob(s, k));
            }
        }
        b[row] = rhs_global[s];
    }
    Eigen::SparseMatrix<double> M(n, n);
    M.setFromTriplets(triplets.begin(), triplets.end());
    M.makeCompressed();

    // infinity norm of M, for the normwise backward error
    double m_norm = 0;
    {
        std::vector<double> row_abs(n, 0.0);
        for (int k = 0; k < M.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it) {
                row_abs[it.row()] += std::abs(it.value());
            }
        }
        for (double r : row_abs) m_norm = std::max(m_norm, r);
    }
    const double b_norm = b.lpNorm<Eigen::Infinity>();
    auto backward_error = [&](const Eigen::VectorXd& h) {
        const double r = (b - M * h).lpNorm<Eigen::Infinity>();
        return r / (m_norm * h.lpNorm<Eigen::Infinity>() + std::max(b_norm, 1e-300));
    };

    Eigen::VectorXd h;
    constexpr Eigen::Index kDirectLimit = 200000;
    if (n <= kDirectLimit) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(M);
        if (lu.info() != Eigen::Success) {
            throw SolveError("sparse factorization failed (matrix may be singular); "
                             "diagonal range [" +
                             std::to_string(M.coeff(0, 0)) + ", ...]");
        }
        h = lu.solve(b);
        // refinement driven by the correction size: a small residual
        // alone can hide large errors when the solution norm is inflated
        for (int round = 0; round < 8; ++round) {
            const Eigen::VectorXd r = b - M * h;
            const Eigen::VectorXd dh = lu.solve(r);
            h += dh;
            if (dh.lpNorm<Eigen::Infinity>() <= 1e-14 * h.lpNorm<Eigen::Infinity>()) break;
        }
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> solver;
        solver.setTolerance(1e-12);
        solver.setMaxIterations(20000);
        solver.compute(M);
        h = solver.solve(b);
        if (solver.info() != Eigen::Success) {
            throw SolveError("iterative solve did not converge, error " +
                             std::to_string(solver.error()));
        }
    }

    out.residual = backward_error(h);
    if (!std::isfinite(out.residual) || out.residual > 1e-10) {
        throw SolveError("restricted solve backward error " + std::to_string(out.residual) +
                         " exceeds 1e-10; the system is too ill-conditioned at this nu");
    }
    // both first-step systems have nonnegative solutions; a sign flip or
    // a condition estimate near 1/eps means the answer carries no
    // correct digits even though the backward error looks fine
    const double h_inf = h.lpNorm<Eigen::Infinity>();
    const double condition = m_norm * h_inf / std::max(b_norm, 1e-300);
    constexpr double kEps = 2.22e-16;
    if (h.minCoeff() < -1e-10 * h_inf || condition * kEps > 1e-2) {
        throw SolveError("system too ill-conditioned: condition estimate " +
                         std::to_string(condition) +
                         "; reduce nu or rescale (expected values overflow double precision)");
    }
    out.solution.assign(h.data(), h.data() + n);
    return out;
}

std::vector<char> member_mask(const StateSpace& space, const StateSet& set) {
    std::vector<char> mask(space.size(), 0);
    for (auto s : set) {
        if (s >= space.size()) throw InputError("state ordinal out of range");
        mask[s] = 1;
    }
    return mask;
}

}  // namespace

std::vector<double> stationary_distribution(const StateSpace& space, double nu) {
    if (nu <= 0) throw InputError("stationary_distribution: nu must be positive");
    const double log_nu = std::log(nu);
    const double top = space.max_weighted_activity();
    std::vector<double> pi(space.size());
    double z = 0;
    for (std::size_t s = 0; s < space.size(); ++s) {
        pi[s] = std::exp((landscape(space, s) - top) * log_nu);
        z += pi[s];
    }
    for (auto& p : pi) p /= z;
    return pi;
}

double aggregate_throughput(const StateSpace& space) {
    if (!space.homogeneous()) {
        throw Unsupported("aggregate throughput is defined for homogeneous rates only");
    }
    return static_cast<double>(space.max_activity()) / space.num_channels();
}

std::vector<double> node_throughput(const StateSpace& space, double nu) {
    const auto pi = stationary_distribution(space, nu);
    std::vector<double> theta(space.num_nodes(), 0.0);
    for (std::size_t s = 0; s < space.size(); ++s) {
        const auto v = space.state_view(s);
        for (int i = 0; i < space.num_nodes(); ++i) {
            if (v[i] != 0) theta[i] += pi[s];
        }
    }
    for (auto& t : theta) t /= space.num_channels();
    return theta;
}

std::vector<double> asymptotic_node_throughput(const StateSpace& space) {
    if (!space.homogeneous()) {
        throw Unsupported("asymptotic node throughput is defined for homogeneous rates only");
    }
    const auto& dom = space.dominant_states();
    std::vector<double> theta(space.num_nodes(), 0.0);
    for (auto s : dom) {
        const auto v = space.state_view(s);
        for (int i = 0; i < space.num_nodes(); ++i) {
            if (v[i] != 0) theta[i] += 1.0;
        }
    }
    const double denom = static_cast<double>(space.num_channels()) * dom.size();
    for (auto& t : theta) t /= denom;
    return theta;
}

std::optional<double> jain_index(const StateSpace& space) {
    const auto theta = asymptotic_node_throughput(space);
    double sum = 0, sumsq = 0;
    for (double t : theta) {
        sum += t;
        sumsq += t * t;
    }
    if (sumsq == 0) return std::nullopt;
    return sum * sum / (space.num_nodes() * sumsq);
}

double communication_height(const StateSpace& space, const StateSet& from, const StateSet& to) {
    if (from.empty() || to.empty()) throw InputError("communication height needs nonempty sets");
    const auto to_mark = member_mask(space, to);
    for (auto s : from) {
        if (to_mark[s]) throw InputError("communication height requires disjoint sets");
    }
    const auto levels = landscape_levels(space);
    std::vector<char> visited(space.size(), 0);
    // connectivity within {landscape >= level} is monotone in the level
    std::size_t lo = 0, hi = levels.size() - 1, best = 0;
    while (lo <= hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (level_connected(space, from, to_mark, levels[mid], visited)) {
            best = mid;
            lo = mid + 1;
        } else {
            if (mid == 0) break;
            hi = mid - 1;
        }
    }
    return space.max_weighted_activity() - levels[best];
}

std::vector<double> heights_from_source(const StateSpace& space, std::size_t source) {
    const auto levels = landscape_levels(space);
    const double top = space.max_weighted_activity();
    std::vector<double> delta(space.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<char> visited(space.size(), 0);
    std::queue<std::size_t> queue;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        const double level = *it;
        if (landscape(space, source) < level) continue;
        std::fill(visited.begin(), visited.end(), 0);
        visited[source] = 1;
        queue.push(source);
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop();
            if (std::isnan(delta[u])) delta[u] = top - level;
            for (const auto& t : space.transitions(u)) {
                const auto v = static_cast<std::size_t>(t.target);
                if (!visited[v] && landscape(space, v) >= level) {
                    visited[v] = 1;
                    queue.push(v);
                }
            }
        }
    }
    return delta;
}

std::vector<std::vector<double>> dominant_delta_matrix(const StateSpace& space) {
    const auto& dom = space.dominant_states();
    std::vector<std::vector<double>> matrix(dom.size(), std::vector<double>(dom.size(), 0.0));
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const auto delta = heights_from_source(space, dom[i]);
        for (std::size_t j = 0; j < dom.size(); ++j) {
            if (j != i) matrix[i][j] = delta[dom[j]];
        }
    }
    return matrix;
}

StarvationReport starvation_indices(const StateSpace& space) {
    const auto& dom = space.dominant_states();
    const auto delta = dominant_delta_matrix(space);
    StarvationReport report;
    report.status.assign(space.num_nodes(), StarvationReport::NodeStatus::Defined);
    report.index.assign(space.num_nodes(), 0.0);

    for (int i = 0; i < space.num_nodes(); ++i) {
        std::vector<std::size_t> active, idle;  // positions within dom
        for (std::size_t d = 0; d < dom.size(); ++d) {
            if (space.state_view(dom[d])[i] != 0) {
                active.push_back(d);
            } else {
                idle.push_back(d);
            }
        }
        if (active.empty()) {
            report.status[i] = StarvationReport::NodeStatus::PermanentStarver;
            continue;
        }
        if (idle.empty()) {
            report.status[i] = StarvationReport::NodeStatus::NeverStarves;
            continue;
        }
        double worst = 0;
        for (auto s : idle) {
            double nearest = std::numeric_limits<double>::infinity();
            for (auto a : active) nearest = std::min(nearest, delta[s][a]);
            worst = std::max(worst, nearest);
        }
        report.index[i] = worst;
        report.network = std::max(report.network.value_or(0.0), worst);
    }
    return report;
}

std::optional<double> gamma_index(const StateSpace& space) {
    const auto& dom = space.dominant_states();
    if (dom.size() < 2) return std::nullopt;
    const auto delta = dominant_delta_matrix(space);
    double gamma = 0;
    for (std::size_t i = 0; i < dom.size(); ++i) {
        for (std::size_t j = i + 1; j < dom.size(); ++j) gamma = std::max(gamma, delta[i][j]);
    }
    return gamma;
}

HittingResult exact_hitting_time(const StateSpace& space, double nu, std::size_t start,
                                 const StateSet& target) {
    if (target.empty()) throw InputError("hitting time needs a nonempty target set");
    const auto in_target = member_mask(space, target);
    if (start >= space.size()) throw InputError("start state ordinal out of range");
    if (in_target[start]) throw InputError("start state must lie outside the target set");

    const auto chain = uniformized_matrix(space, nu);
    std::vector<char> keep(space.size());
    for (std::size_t s = 0; s < space.size(); ++s) keep[s] = !in_target[s];
    const std::vector<double> ones(space.size(), 1.0);
    const auto solve = solve_restricted(space, chain, keep, ones);

    HittingResult result;
    result.expected_time = solve.solution[solve.local_of[start]] / chain.q_max;
    result.residual = solve.residual;
    return result;
}

ExponentFit hitting_exponent(const StateSpace& space, std::size_t start, const StateSet& target,
                             const std::vector<double>& nu_grid) {
    validate_nu_grid(nu_grid);
    ExponentFit fit;
    fit.nu_grid = nu_grid;
    std::vector<double> lx, ly;
    for (double nu : nu_grid) {
        const auto h = exact_hitting_time(space, nu, start, target);
        fit.values.push_back(h.expected_time);
        fit.log_nu_values.push_back(std::log(h.expected_time) / std::log(nu));
        lx.push_back(std::log(nu));
        ly.push_back(std::log(h.expected_time));
    }
    fit.slope = ols_slope(lx, ly, &fit.intercept);
    return fit;
}

ResistanceResult resistances(const StateSpace& space, double nu, std::size_t x,
                             const StateSet& target) {
    if (target.empty()) throw InputError("resistances need a nonempty target set");
    const auto in_target = member_mask(space, target);
    if (x >= space.size()) throw InputError("state ordinal out of range");
    if (in_target[x]) throw InputError("x must lie outside the target set");

    const auto pi = stationary_distribution(space, nu);
    const auto chain = uniformized_matrix(space, nu);

    // escape probability: g(z) = P_z(T_A < T_x) for z outside A and x
    std::vector<char> keep(space.size());
    std::vector<double> rhs(space.size(), 0.0);
    for (std::size_t s = 0; s < space.size(); ++s) keep[s] = !in_target[s] && s != x;
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (!keep[s]) continue;
        const auto moves = space.transitions(s);
        double b = 0;
        for (std::size_t k = 0; k < moves.size(); ++k) {
            if (in_target[static_cast<std::size_t>(moves[k].target)]) b += chain.prob(s, k);
        }
        rhs[s] = b;
    }
    const auto solve = solve_restricted(space, chain, keep, rhs);

    double escape = 0;
    {
        const auto moves = space.transitions(x);
        for (std::size_t k = 0; k < moves.size(); ++k) {
            const auto y = static_cast<std::size_t>(moves[k].target);
            if (in_target[y]) {
                escape += chain.prob(x, k);
            } else if (y != x) {
                escape += chain.prob(x, k) * solve.solution[solve.local_of[y]];
            }
        }
    }
    if (escape <= 0) throw SolveError("escape probability underflowed to zero");

    ResistanceResult result;
    result.effective = 1.0 / (pi[x] * escape);

    // critical resistance: minimax edge resistance over paths x -> A
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(space.size(), inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    best[x] = 0;
    heap.emplace(0.0, x);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > best[u]) continue;
        if (in_target[u]) {
            result.critical = d;
            return result;
        }
        const auto moves = space.transitions(u);
        for (std::size_t k = 0; k < moves.size(); ++k) {
            const auto v = static_cast<std::size_t>(moves[k].target);
            const double r = 1.0 / (pi[u] * chain.prob(u, k));
            const double via = std::max(d, r);
            if (via < best[v]) {
                best[v] = via;
                heap.emplace(via, v);
            }
        }
    }
    throw SolveError("target set unreachable in the transition graph");
}

double spectral_gap(const StateSpace& space, double nu) {
    const std::size_t n = space.size();
    if (n < 2) throw InputError("spectral gap needs at least two states");
    const auto& rates = space.network().rates;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < n; ++s) {
        double exit = 0;
        for (const auto& t : space.transitions(s)) {
            const double q = t.activation ? rates.activation_rate(t.node, t.channel, nu) : 1.0;
            exit += q;
            // symmetrized off-diagonal: sqrt(q(x,y) q(y,x)); the reverse
            // move of an activation is a unit-rate deactivation
            const double qrev = t.activation ? 1.0 : rates.activation_rate(t.node, t.channel, nu);
            m(s, t.target) = std::sqrt(q * qrev);
        }
        m(s, s) = -exit;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw SolveError("eigenvalue computation failed");
    return -solver.eigenvalues()[n - 2];
}

std::optional<MixingReport> mixing_bound(const StateSpace& space,
                                         const std::vector<double>& nu_grid, double epsilon,
                                         std::size_t gap_state_limit) {
    validate_nu_grid(nu_grid);
    if (!(epsilon > 0 && epsilon < 0.5)) throw InputError("epsilon must lie in (0, 1/2)");
    const auto& dom = space.dominant_states();
    if (dom.size() < 2) return std::nullopt;

    const auto delta = dominant_delta_matrix(space);
    double gamma = 0;
    std::size_t si = 0, sj = 1;
    for (std::size_t i = 0; i < dom.size(); ++i) {
        for (std::size_t j = i + 1; j < dom.size(); ++j) {
            if (delta[i][j] > gamma) {
                gamma = delta[i][j];
                si = i;
                sj = j;
            }
        }
    }

    MixingReport report;
    report.epsilon = epsilon;
    report.source_dominant = dom[si];
    report.target_dominant = dom[sj];
    report.gamma_value = gamma;
    report.nu_grid = nu_grid;
    report.boundary_level = space.max_weighted_activity() - gamma + 1;

    const auto heights = heights_from_source(space, dom[si]);
    std::vector<char> in_S(space.size(), 0);
    for (std::size_t s = 0; s < space.size(); ++s) in_S[s] = heights[s] < gamma;

    // structural boundary check on the constructed S: every state of S
    // with an exit into S^c sits exactly at level A(C) - Gamma(C) + 1
    report.boundary_ok = true;
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (!in_S[s]) continue;
        bool exits = false;
        for (const auto& t : space.transitions(s)) {
            if (!in_S[static_cast<std::size_t>(t.target)]) {
                exits = true;
                break;
            }
        }
        if (exits && landscape(space, s) != report.boundary_level) {
            report.boundary_ok = false;
            break;
        }
    }

    // keep the smaller side: swap for the complement if pi(S) > 1/2 at
    // the largest nu
    {
        const auto pi = stationary_distribution(space, nu_grid.back());
        double mass = 0;
        for (std::size_t s = 0; s < space.size(); ++s) {
            if (in_S[s]) mass += pi[s];
        }
        if (mass > 0.5) {
            for (auto& b : in_S) b = !b;
            report.complemented = true;
        }
    }
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (in_S[s]) report.bottleneck_set.push_back(s);
    }

    const auto& rates = space.network().rates;
    std::vector<double> lx, ly_phi, ly_bound;
    for (double nu : nu_grid) {
        const auto pi = stationary_distribution(space, nu);
        double flow = 0, mass = 0;
        for (std::size_t s = 0; s < space.size(); ++s) {
            if (!in_S[s]) continue;
            mass += pi[s];
            for (const auto& t : space.transitions(s)) {
                if (in_S[static_cast<std::size_t>(t.target)]) continue;
                const double q =
                    t.activation ? rates.activation_rate(t.node, t.channel, nu) : 1.0;
                flow += pi[s] * q;
            }
        }
        const double phi = flow / mass;
        report.flow.push_back(flow);
        report.pi_S.push_back(mass);
        report.conductance.push_back(phi);
        report.lower_bound.push_back((0.5 - epsilon) / phi);
        lx.push_back(std::log(nu));
        ly_phi.push_back(std::log(phi));
        ly_bound.push_back(std::log((0.5 - epsilon) / phi));
    }
    report.conductance_exponent = ols_slope(lx, ly_phi, nullptr);
    report.bound_exponent = ols_slope(lx, ly_bound, nullptr);

    report.relaxation_exponent = std::numeric_limits<double>::quiet_NaN();
    if (space.size() <= gap_state_limit) {
        std::vector<double> ly_relax;
        for (double nu : nu_grid) {
            const double g = spectral_gap(space, nu);
            report.gap.push_back(g);
            ly_relax.push_back(-std::log(g));
        }
        report.relaxation_exponent = ols_slope(lx, ly_relax, nullptr);
    }
    return report;
}

AnalysisReport analyze(const StateSpace& space, const AnalyzeOptions& options) {
    AnalysisReport report;
    report.weighted = !space.homogeneous();
    report.num_nodes = space.num_nodes();
    report.num_channels = space.num_channels();
    report.A_C = space.max_activity();
    report.A_weighted = space.max_weighted_activity();
    report.dominant_count = space.dominant_states().size();
    for (auto s : space.dominant_states()) report.dominants.push_back(space.state(s));
    if (!report.weighted) {
        report.theta = aggregate_throughput(space);
        report.theta_per_node = asymptotic_node_throughput(space);
        report.jain = jain_index(space);
    }
    report.nu_grid = options.nu_grid;
    if (report.dominant_count > options.max_height_dominants) {
        report.heights_skipped = true;
        report.starvation.status.assign(space.num_nodes(),
                                        StarvationReport::NodeStatus::Defined);
        report.starvation.index.assign(space.num_nodes(), 0.0);
        return report;
    }
    report.delta_matrix = dominant_delta_matrix(space);
    report.starvation = starvation_indices(space);
    report.gamma = gamma_index(space);
    if (options.with_conductance && report.gamma) {
        const auto mix = mixing_bound(space, options.nu_grid, options.epsilon);
        if (mix) report.conductance_exponent = mix->conductance_exponent;
    }
    return report;
}

}  // namespace mcsma
