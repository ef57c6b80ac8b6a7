#pragma once

// Brute-force reference implementations the tests pin expected values
// against. Everything here favors directness over speed: explicit matrix
// powers, explicit per-driver sums, full stacked least squares, boolean
// reachability closures. None of it shares code with the library paths it
// checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "gramcent/rng.hpp"

namespace oracle {

inline Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& a, int t) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    for (int s = 0; s < t; ++s) p = (a * p).eval();
    return p;
}

inline Eigen::MatrixXd input_matrix(int n, const std::vector<int>& drivers) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(drivers.size()));
    for (std::size_t k = 0; k < drivers.size(); ++k) b(drivers[k], static_cast<Eigen::Index>(k)) = 1.0;
    return b;
}

// W = sum_{t<T} A^t B B' (A')^t with explicit powers.
inline Eigen::MatrixXd ctrb_brute(const Eigen::MatrixXd& a, const std::vector<int>& drivers, int t_end) {
    const int n = static_cast<int>(a.rows());
    const Eigen::MatrixXd b = input_matrix(n, drivers);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < t_end; ++t) {
        const Eigen::MatrixXd at = matrix_power(a, t);
        w += at * b * b.transpose() * at.transpose();
    }
    return w;
}

// M = sum_{t<T} (A')^t C' C A^t with C reading the probe rows.
inline Eigen::MatrixXd obsv_brute(const Eigen::MatrixXd& a, const std::vector<int>& probes, int t_end) {
    const int n = static_cast<int>(a.rows());
    const Eigen::MatrixXd c = input_matrix(n, probes).transpose();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < t_end; ++t) {
        const Eigen::MatrixXd at = matrix_power(a, t);
        m += at.transpose() * c.transpose() * c * at;
    }
    return m;
}

// Infinite-horizon reference by plain summation until the terms are dead.
// Requires spectral radius < 1; the cap is a hard failure guard for tests.
inline Eigen::MatrixXd ctrb_brute_inf(const Eigen::MatrixXd& a, const std::vector<int>& drivers,
                                      double tail_tol = 1e-15, int cap = 20000) {
    const int n = static_cast<int>(a.rows());
    const Eigen::MatrixXd b = input_matrix(n, drivers);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd p = b;
    for (int t = 0; t < cap; ++t) {
        if (t > 0) p = (a * p).eval();
        const Eigen::MatrixXd term = p * p.transpose();
        w += term;
        if (t > 0 && term.norm() <= tail_tol * std::max(w.norm(), 1e-300)) return w;
    }
    return w;  // tests assert convergence separately where it matters
}

// Flow matrix over the horizon: entry (i, j) = eps(i -> j) = sum_t ((A^t)_{ji})^2.
inline Eigen::MatrixXd energy_flow_matrix(const Eigen::MatrixXd& a, int t_end) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXd flows = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < t_end; ++t) {
        const Eigen::MatrixXd at = matrix_power(a, t);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) flows(i, j) += at(j, i) * at(j, i);
        }
    }
    return flows;
}

// Centralities straight from their definitions, one per-driver (per-probe)
// Gramian trace at a time.
inline Eigen::VectorXd p_brute(const Eigen::MatrixXd& a, int t_end) {
    const int n = static_cast<int>(a.rows());
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = ctrb_brute(a, {i}, t_end).trace();
    return p;
}

inline Eigen::VectorXd q_brute(const Eigen::MatrixXd& a, int t_end) {
    const int n = static_cast<int>(a.rows());
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q(i) = obsv_brute(a, {i}, t_end).trace();
    return q;
}

// Minimum-norm input steering the origin to x_f in t_end steps, via the
// stacked steering map G = [A^(T-1)B, ..., B] and its pseudoinverse.
// Returns the stacked input (u(0) first) and its squared norm.
inline std::pair<Eigen::VectorXd, double> least_norm_steering(const Eigen::MatrixXd& a,
                                                              const std::vector<int>& drivers,
                                                              int t_end,
                                                              const Eigen::VectorXd& x_f) {
    const int n = static_cast<int>(a.rows());
    const auto m = static_cast<Eigen::Index>(drivers.size());
    const Eigen::MatrixXd b = input_matrix(n, drivers);
    Eigen::MatrixXd g(n, m * t_end);
    for (int t = 0; t < t_end; ++t) {
        g.middleCols(static_cast<Eigen::Index>(t) * m, m) = matrix_power(a, t_end - 1 - t) * b;
    }
    const Eigen::VectorXd u = g.completeOrthogonalDecomposition().solve(x_f);
    return {u, u.squaredNorm()};
}

// Strongly connected components by forward/backward boolean reachability,
// deliberately unrelated to Tarjan.
inline int scc_count_reach(const Eigen::MatrixXd& adj) {
    const int n = static_cast<int>(adj.rows());
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
        reach[i][i] = true;
        // BFS from i along src -> dst edges; adj(d, s) nonzero means s -> d.
        std::vector<int> queue{i};
        while (!queue.empty()) {
            const int s = queue.back();
            queue.pop_back();
            for (int d = 0; d < n; ++d) {
                if (adj(d, s) != 0.0 && !reach[i][d]) {
                    reach[i][d] = true;
                    queue.push_back(d);
                }
            }
        }
    }
    std::vector<int> comp(n, -1);
    int count = 0;
    for (int i = 0; i < n; ++i) {
        if (comp[i] != -1) continue;
        for (int j = i; j < n; ++j) {
            if (reach[i][j] && reach[j][i]) comp[j] = count;
        }
        ++count;
    }
    return count;
}

// All m-subsets of {0, ..., n-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets(int n, int m) {
    std::vector<std::vector<int>> all;
    std::vector<int> current(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) current[static_cast<std::size_t>(i)] = i;
    if (m > n) return all;
    for (;;) {
        all.push_back(current);
        int k = m - 1;
        while (k >= 0 && current[static_cast<std::size_t>(k)] == n - m + k) --k;
        if (k < 0) break;
        ++current[static_cast<std::size_t>(k)];
        for (int j = k + 1; j < m; ++j) {
            current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return all;
}

// Random test matrix with entries of magnitude in [0.2, 1] and random sign,
// so structural nonzeros stay well away from rounding noise. dag=true keeps
// the strict lower block (edges only from smaller to larger index), which
// makes the matrix nilpotent by construction.
inline Eigen::MatrixXd random_net(gramcent::Rng& rng, int n, double density, bool dag) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int src = 0; src < n; ++src) {
        for (int dst = 0; dst < n; ++dst) {
            if (dag && dst <= src) continue;
            if (!dag && dst == src && rng.uniform() >= density * 0.5) continue;
            if (dst != src && rng.uniform() >= density) continue;
            const double mag = 0.2 + 0.8 * rng.uniform();
            a(dst, src) = rng.uniform() < 0.5 ? mag : -mag;
        }
    }
    return a;
}

}  // namespace oracle
