#include "gramcent/gramian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gramcent {

namespace {

// Doubling past 2^60 steps means the tolerance is unreachable; treat as
// non-convergence regardless of the configured iteration cap.
constexpr int kDoublingHardCap = 60;

void check_nodes(const Network& net, const std::vector<int>& nodes, const char* what) {
    if (nodes.empty()) throw ValidationError(std::string(what) + " set must be non-empty");
    std::vector<int> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= net.size()) {
        throw ValidationError(std::string(what) + " index out of range 1.." +
                              std::to_string(net.size()));
    }
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError(std::string(what) + " set contains a repeated node");
    }
}

Eigen::MatrixXd input_matrix(const Network& net, const std::vector<int>& drivers) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(net.size(), static_cast<Eigen::Index>(drivers.size()));
    for (std::size_t k = 0; k < drivers.size(); ++k) b(drivers[k], static_cast<Eigen::Index>(k)) = 1.0;
    return b;
}

void require_stable(const Network& net, const char* what) {
    const double r = net.spectral_radius();
    if (!(r < 1.0)) {
        throw StabilityError(std::string("infinite-horizon ") + what +
                                 " requires spectral radius < 1, got " + std::to_string(r),
                             r);
    }
}

// Finite-horizon sum via running input powers: P_0 = B, P_{t+1} = A P_t,
// W = sum P_t P_t'. Costs O(T n^2 m) without ever forming A^t.
Eigen::MatrixXd finite_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int t_end) {
    Eigen::MatrixXd p = b;
    Eigen::MatrixXd w = p * p.transpose();
    for (int t = 1; t < t_end; ++t) {
        p = (a * p).eval();
        w.noalias() += p * p.transpose();
    }
    return w;
}

Eigen::MatrixXd symmetrized(Eigen::MatrixXd m) {
    return 0.5 * (m + m.transpose()).eval();
}

Gramian ctrb_core(const Network& net, const Eigen::MatrixXd& a, const std::vector<int>& nodes,
                  const GramianSpec& spec, const char* what) {
    spec.validate();
    check_nodes(net, nodes, what);
    if (spec.is_infinite()) {
        require_stable(net, what);
        DiscreteLyapunovSolver solver(a, spec.lyap_tol, spec.lyap_max_iter);
        return {symmetrized(solver.solve_indicator(nodes)), nodes, spec};
    }
    const Eigen::MatrixXd b = input_matrix(net, nodes);
    return {symmetrized(finite_sum(a, b, *spec.horizon)), nodes, spec};
}

}  // namespace

void GramianSpec::validate() const {
    if (horizon.has_value() && *horizon < 1) {
        throw ValidationError("finite horizon must be at least 1");
    }
    if (!(lyap_tol > 0.0) || !std::isfinite(lyap_tol)) {
        throw ValidationError("solver tolerance must be positive and finite");
    }
    if (lyap_max_iter < 1) throw ValidationError("solver iteration cap must be positive");
}

Eigen::MatrixXd controllability_matrix(const Network& net, const std::vector<int>& drivers, int t) {
    if (t < 1) throw ValidationError("controllability matrix horizon must be at least 1");
    check_nodes(net, drivers, "driver");
    const int n = net.size();
    const auto m = static_cast<Eigen::Index>(drivers.size());
    Eigen::MatrixXd result(n, m * t);
    Eigen::MatrixXd p = input_matrix(net, drivers);
    for (int block = 0; block < t; ++block) {
        if (block > 0) p = (net.adjacency() * p).eval();
        result.middleCols(block * m, m) = p;
    }
    return result;
}

Gramian ctrb_gramian(const Network& net, const std::vector<int>& drivers, const GramianSpec& spec) {
    return ctrb_core(net, net.adjacency(), drivers, spec, "driver");
}

Gramian obsv_gramian(const Network& net, const std::vector<int>& probes, const GramianSpec& spec) {
    // M(A, C) with C = indicator rows equals W(A', C'), so one core serves
    // both directions.
    return ctrb_core(net, net.adjacency().transpose(), probes, spec, "probe");
}

AggregateGramians aggregate_gramians(const Network& net, const GramianSpec& spec) {
    std::vector<int> all(net.size());
    for (int i = 0; i < net.size(); ++i) all[i] = i;
    return {ctrb_gramian(net, all, spec), obsv_gramian(net, all, spec)};
}

double energy_flow(const Network& net, int from, int to, const GramianSpec& spec) {
    spec.validate();
    check_nodes(net, {from}, "source");
    check_nodes(net, {to}, "destination");
    if (spec.is_infinite()) {
        // (to, to) diagonal entry of the single-driver Gramian.
        return ctrb_gramian(net, {from}, spec).mat(to, to);
    }
    // Direct summation of squared path weights, one vector iteration.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(net.size());
    v(from) = 1.0;
    double acc = 0.0;
    for (int t = 0; t < *spec.horizon; ++t) {
        if (t > 0) v = (net.adjacency() * v).eval();
        acc += v(to) * v(to);
    }
    return acc;
}

Eigen::VectorXd self_energy(const Network& net, const GramianSpec& spec) {
    spec.validate();
    const int n = net.size();
    const Eigen::MatrixXd& a = net.adjacency();

    int t_end;
    double tail_tol = 0.0;
    if (spec.is_infinite()) {
        require_stable(net, "self flow");
        const double rho = net.spectral_radius();
        // Diagonal terms decay like rho^(2t); run until the analytic bound
        // and the observed terms are both below tolerance.
        tail_tol = spec.lyap_tol;
        t_end = rho == 0.0
                    ? n + 1
                    : static_cast<int>(std::ceil(std::log(tail_tol) / (2.0 * std::log(rho)))) + 2;
        t_end = std::max(t_end, 2);
    } else {
        t_end = *spec.horizon;
    }

    Eigen::VectorXd acc = Eigen::VectorXd::Ones(n);  // t = 0 term, A^0 = I
    if (t_end == 1) return acc;
    Eigen::MatrixXd p = a;
    const int hard_cap = spec.is_infinite() ? 10 * t_end + 1000 : t_end;
    for (int t = 1; t < hard_cap; ++t) {
        if (t > 1) p = (a * p).eval();
        const double max_sq = p.diagonal().cwiseAbs2().maxCoeff();
        acc += p.diagonal().cwiseAbs2();
        if (spec.is_infinite() && t + 1 >= t_end && max_sq <= tail_tol) {
            return acc;
        }
    }
    if (spec.is_infinite()) {
        throw ConvergenceError("self-flow series did not reach tolerance", hard_cap);
    }
    return acc;
}

DiscreteLyapunovSolver::DiscreteLyapunovSolver(Eigen::MatrixXd a, double tol, int max_iter)
    : tol_(tol), max_iter_(max_iter) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw ValidationError("Lyapunov solver needs a non-empty square matrix");
    }
    if (!(tol > 0.0) || max_iter < 1) {
        throw ValidationError("Lyapunov solver needs positive tolerance and iteration cap");
    }
    powers_.push_back(std::move(a));
}

const Eigen::MatrixXd& DiscreteLyapunovSolver::power(int k) {
    while (static_cast<int>(powers_.size()) <= k) {
        const Eigen::MatrixXd& last = powers_.back();
        powers_.push_back(last * last);
    }
    return powers_[static_cast<std::size_t>(k)];
}

Eigen::MatrixXd DiscreteLyapunovSolver::run(const Eigen::MatrixXd& q) {
    // Invariant: after k steps, w = sum_{t < 2^k} A^t Q (A')^t with
    // P = A^(2^k). The doubling increment P w P' is the exact bracket
    // sum_{2^k <= t < 2^(k+1)}, and the full remaining tail T obeys
    // T = P (w + T) P', hence ||T|| <= ||P w P'|| / (1 - ||P||_F^2)
    // whenever ||P||_F < 1. Stopping on that certified bound keeps the
    // true truncation error, not just the next bracket, under tolerance.
    Eigen::MatrixXd w = q;
    const int cap = std::min(max_iter_, kDoublingHardCap);
    for (int k = 0; k < cap; ++k) {
        const Eigen::MatrixXd& pk = power(k);
        Eigen::MatrixXd term = pk * (w * pk.transpose());
        const double pf2 = pk.squaredNorm();
        if (pf2 < 1.0 && term.norm() <= tol_ * (1.0 - pf2) * std::max(w.norm(), 1e-300)) {
            last_iterations_ = k;
            return w;
        }
        w.noalias() += term;
    }
    throw ConvergenceError("Lyapunov doubling did not reach tolerance (is the radius < 1?)", cap);
}

Eigen::MatrixXd DiscreteLyapunovSolver::solve(const Eigen::MatrixXd& q) {
    const int n = static_cast<int>(powers_[0].rows());
    if (q.rows() != n || q.cols() != n) {
        throw ValidationError("right-hand side shape does not match the system matrix");
    }
    return run(q);
}

Eigen::MatrixXd DiscreteLyapunovSolver::solve_indicator(const std::vector<int>& cols) {
    const int n = static_cast<int>(powers_[0].rows());
    if (cols.empty()) throw ValidationError("indicator column set must be non-empty");
    for (int c : cols) {
        if (c < 0 || c >= n) throw ValidationError("indicator column out of range");
    }
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int c : cols) q(c, c) += 1.0;
    return run(q);
}

}  // namespace gramcent
