#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <utility>
#include <vector>

#include "gramcent/errors.hpp"

namespace gramcent {

/// Weighted directed network held as a dense adjacency matrix.
///
/// Convention: adjacency()(j, i) is the weight of the edge from node i to
/// node j, so column i collects the outgoing edges of node i and the state
/// update reads x(t+1) = A x(t) + B u(t). Node indices are 0-based across
/// the C++ API; the file formats and the CLI speak 1-based ids.
///
/// Instances are immutable. The spectral radius is computed on first use
/// and cached; the cache is an atomic so concurrent readers are safe.
class Network {
public:
    explicit Network(Eigen::MatrixXd adjacency);

    /// Constructor for callers that already know the spectral radius
    /// (rescaling scales the radius exactly, no point recomputing it).
    Network(Eigen::MatrixXd adjacency, double known_spectral_radius);

    Network(const Network& other)
        : adj_(other.adj_), radius_(other.radius_.load(std::memory_order_relaxed)) {}
    Network(Network&& other) noexcept
        : adj_(std::move(other.adj_)), radius_(other.radius_.load(std::memory_order_relaxed)) {}
    Network& operator=(const Network& other) {
        adj_ = other.adj_;
        radius_.store(other.radius_.load(std::memory_order_relaxed), std::memory_order_relaxed);
        return *this;
    }
    Network& operator=(Network&& other) noexcept {
        adj_ = std::move(other.adj_);
        radius_.store(other.radius_.load(std::memory_order_relaxed), std::memory_order_relaxed);
        return *this;
    }

    int size() const { return static_cast<int>(adj_.rows()); }
    const Eigen::MatrixXd& adjacency() const { return adj_; }

    /// Largest eigenvalue magnitude, cached after the first call.
    double spectral_radius() const;

    bool stable() const { return spectral_radius() < 1.0; }

private:
    Eigen::MatrixXd adj_;
    mutable std::atomic<double> radius_;  // NaN until computed
};

/// Validates shape and entries, returns the wrapped network.
Network network_from_matrix(const Eigen::MatrixXd& mat);

/// Largest eigenvalue magnitude of a square matrix. Dense eigensolve up to
/// 2000 nodes, block power iteration beyond (handles complex-pair dominant
/// eigenvalues that defeat single-vector iteration).
double spectral_radius_of(const Eigen::MatrixXd& mat);

/// The block-iteration fallback itself; exposed so its accuracy is testable
/// at small sizes against the dense solver.
double spectral_radius_iterative(const Eigen::MatrixXd& mat, int block = 4, int max_iter = 5000);

/// Scales the weights so the spectral radius becomes exactly rho.
/// Networks without a directed cycle have radius zero and are rejected.
Network rescale_to_radius(const Network& net, double rho);

/// Parameters for the random-network generators.
struct GeneratorParams {
    enum class Kind { erdos_renyi, directed_scale_free };

    Kind kind = Kind::erdos_renyi;
    int n = 0;
    double edge_prob = 0.0;  // Erdos-Renyi only
    // Directed scale-free growth: event probabilities and attachment offsets.
    double sf_alpha = 0.2;
    double sf_beta = 0.6;
    double sf_gamma = 0.2;
    double sf_delta_in = 1.78;
    double sf_delta_out = 1.26;
    double target_rho = 0.9;
    std::uint64_t seed = 0;

    static GeneratorParams erdos_renyi_params(int n, double edge_prob, double target_rho,
                                              std::uint64_t seed);
    static GeneratorParams scale_free_params(int n, double target_rho, std::uint64_t seed);

    void validate() const;

    /// Asymptotic in-degree tail exponent implied by the growth parameters:
    /// 1 + (1 + delta_in (alpha + gamma)) / (alpha + beta).
    double indegree_exponent() const;
    /// Out-degree counterpart: 1 + (1 + delta_out (alpha + gamma)) / (gamma + beta).
    double outdegree_exponent() const;
};

/// Generator output. `rescaled` is false when the raw draw had spectral
/// radius exactly zero (no directed cycle), in which case the weights are
/// returned as drawn.
struct GeneratedNetwork {
    Network network;
    bool rescaled;
};

GeneratedNetwork generate_erdos_renyi(const GeneratorParams& params);
GeneratedNetwork generate_directed_scale_free(const GeneratorParams& params);
GeneratedNetwork generate_network(const GeneratorParams& params);

/// Raw edge list grown by the preferential-attachment process, with
/// multiplicities, before collapsing, repair, self-loops and weights.
/// Exposed so degree statistics can be measured on the growth process
/// itself. Pairs are (source, destination).
std::vector<std::pair<int, int>> scale_free_multigraph(const GeneratorParams& params);

/// Adds the fewest structural edges needed to make the network strongly
/// connected (one cycle through the condensation), then gives every node a
/// self-loop. New weights are standard normal draws from the seed.
Network ensure_strongly_connected(const Network& net, std::uint64_t seed);

/// Strongly-connected-component id per node (Tarjan). Ids are 0-based and
/// assigned so that the component containing the smallest node index gets
/// the smallest id.
std::vector<int> scc_ids(const Network& net);
int scc_count(const Network& net);

/// Nodes with no incoming edges (roots) and no outgoing edges (leaves);
/// self-loops count as both an incoming and an outgoing edge.
struct RootsAndLeaves {
    std::vector<int> roots;
    std::vector<int> leaves;
};
RootsAndLeaves roots_and_leaves(const Network& net);

}  // namespace gramcent
