#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "gramcent/netgraph.hpp"

namespace gramcent {

/// Horizon and solver settings for Gramian computations.
///
/// horizon = nullopt means the infinite horizon, which requires spectral
/// radius below one and is computed by solving the discrete Lyapunov
/// equation A W A' - W + B B' = 0. A finite horizon T sums the first T
/// terms of the defining series directly.
struct GramianSpec {
    std::optional<int> horizon = std::nullopt;
    double lyap_tol = 1e-12;
    int lyap_max_iter = 200;

    static GramianSpec infinite() { return {}; }
    static GramianSpec finite(int t) {
        GramianSpec spec;
        spec.horizon = t;
        return spec;
    }

    bool is_infinite() const { return !horizon.has_value(); }
    void validate() const;
};

/// A controllability or observability Gramian. The matrix is symmetrized on
/// construction, so exact symmetry can be assumed downstream.
struct Gramian {
    Eigen::MatrixXd mat;
    std::vector<int> drivers;  // probe nodes, for observability Gramians
    GramianSpec spec;
};

/// Columns [B, AB, ..., A^(T-1) B] for the input matrix built from the given
/// driver columns. The caller owns any rank decisions.
Eigen::MatrixXd controllability_matrix(const Network& net, const std::vector<int>& drivers, int t);

/// W = sum over t < T of A^t B B' (A')^t, or its infinite-horizon limit.
Gramian ctrb_gramian(const Network& net, const std::vector<int>& drivers, const GramianSpec& spec);

/// Observability counterpart: M = sum of (A')^t C' C A^t with C reading the
/// probe nodes. Computed as the controllability Gramian of the transposed
/// network, which is the same sum.
Gramian obsv_gramian(const Network& net, const std::vector<int>& probes, const GramianSpec& spec);

/// Both full-support Gramians (every node a driver, every node a probe) from
/// one solve each. Their diagonals carry all per-node centralities, so this
/// replaces 2n single-node solves.
struct AggregateGramians {
    Gramian w_full;
    Gramian m_full;
};
AggregateGramians aggregate_gramians(const Network& net, const GramianSpec& spec);

/// Energy flow from node `from` to node `to`: the sum over the horizon of
/// squared (from -> to) path weights, ((A^t)_{to,from})^2.
double energy_flow(const Network& net, int from, int to, const GramianSpec& spec);

/// Per-node self flow, component i = sum over t of ((A^t)_{ii})^2. The
/// infinite-horizon version truncates once the tail is provably below
/// lyap_tol (geometric decay at rate spectral_radius^2).
Eigen::VectorXd self_energy(const Network& net, const GramianSpec& spec);

/// Solves A X A' - X + Q = 0 by the squared Smith iteration
///   X <- X + A_k X A_k',  A_k <- A_k^2,
/// which doubles the summed horizon each step. The power ladder A^(2^k) is
/// cached and shared across solves for the same matrix, which is what makes
/// per-driver-set sweeps affordable. Not thread-safe; use one instance per
/// thread.
class DiscreteLyapunovSolver {
public:
    DiscreteLyapunovSolver(Eigen::MatrixXd a, double tol = 1e-12, int max_iter = 200);

    /// General symmetric positive semidefinite right-hand side.
    Eigen::MatrixXd solve(const Eigen::MatrixXd& q);

    /// Convenience for Q = sum of e_c e_c' over the given columns, the
    /// right-hand side every Gramian in this library uses.
    Eigen::MatrixXd solve_indicator(const std::vector<int>& cols);

    int last_iterations() const { return last_iterations_; }

private:
    const Eigen::MatrixXd& power(int k);
    Eigen::MatrixXd run(const Eigen::MatrixXd& q);

    std::vector<Eigen::MatrixXd> powers_;  // powers_[k] = A^(2^k)
    double tol_;
    int max_iter_;
    int last_iterations_ = 0;
};

}  // namespace gramcent
