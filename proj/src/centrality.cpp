#include "gramcent/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "gramcent/rng.hpp"

namespace gramcent {

namespace {

// A q_tilde value may come out slightly negative because q and the self flow
// are computed by different algorithms; within this relative slack it clamps
// to zero, beyond it the discrepancy is a real failure.
constexpr double kQTildeSlack = 1e-9;

std::vector<int> order_by_score(const Eigen::VectorXd& score) {
    std::vector<int> order(static_cast<std::size_t>(score.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&score](int a, int b) {
        if (score(a) != score(b)) return score(a) > score(b);
        return a < b;
    });
    return order;
}

}  // namespace

CentralityTable compute_centralities(const Network& net, const GramianSpec& spec) {
    spec.validate();
    const auto [w_full, m_full] = aggregate_gramians(net, spec);

    CentralityTable table;
    table.spec = spec;
    table.p = m_full.mat.diagonal();
    table.q = w_full.mat.diagonal();

    const Eigen::VectorXd self = self_energy(net, spec);
    table.q_tilde = table.q - self;
    for (int i = 0; i < table.size(); ++i) {
        const double qt = table.q_tilde(i);
        if (qt < 0.0) {
            if (qt < -kQTildeSlack * std::max(table.q(i), 1.0)) {
                throw NumericError("received-flow centrality of node " + std::to_string(i + 1) +
                                   " is negative beyond tolerance: " + std::to_string(qt));
            }
            table.q_tilde(i) = 0.0;
        }
    }

    table.r_diff = table.p - table.q;
    table.r_quot = table.p.cwiseQuotient(table.q);
    return table;
}

std::vector<int> rank_nodes(const CentralityTable& table, RankCriterion criterion) {
    switch (criterion) {
        case RankCriterion::rank_diff:
            return order_by_score(table.r_diff);
        case RankCriterion::rank_quot:
            return order_by_score(table.r_quot);
        case RankCriterion::p_only:
            return order_by_score(table.p);
    }
    throw ValidationError("unknown ranking criterion");
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::rank_diff: return "rank_diff";
        case Strategy::rank_quot: return "rank_quot";
        case Strategy::trace_max: return "trace_max";
        case Strategy::random: return "random";
        case Strategy::target_flow: return "target_flow";
    }
    return "unknown";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
    if (name == "rank_diff") return Strategy::rank_diff;
    if (name == "rank_quot") return Strategy::rank_quot;
    if (name == "trace_max") return Strategy::trace_max;
    if (name == "random") return Strategy::random;
    return std::nullopt;  // target_flow is not selectable by name
}

namespace {

DriverSet random_drivers(int n, int m, std::optional<std::uint64_t> seed) {
    if (!seed.has_value()) {
        throw ValidationError("random driver placement requires a seed");
    }
    // Partial front Fisher-Yates: position k swaps with a uniform pick from
    // the unshuffled tail, so the first m entries of a longer run are
    // unchanged (prefix property across an m sweep).
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(*seed);
    for (int k = 0; k < m; ++k) {
        const auto j = k + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n - k)));
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
    }
    perm.resize(static_cast<std::size_t>(m));
    return {std::move(perm), Strategy::random, seed};
}

void check_m(int m, int n) {
    if (m < 1 || m > n) {
        throw ValidationError("driver count must lie in 1.." + std::to_string(n) + ", got " +
                              std::to_string(m));
    }
}

}  // namespace

DriverSet select_drivers(const CentralityTable& table, Strategy strategy, int m,
                         std::optional<std::uint64_t> seed) {
    check_m(m, table.size());
    RankCriterion criterion;
    switch (strategy) {
        case Strategy::rank_diff: criterion = RankCriterion::rank_diff; break;
        case Strategy::rank_quot: criterion = RankCriterion::rank_quot; break;
        case Strategy::trace_max: criterion = RankCriterion::p_only; break;
        case Strategy::random: return random_drivers(table.size(), m, seed);
        default:
            throw ValidationError("strategy is not selectable from a centrality table");
    }
    std::vector<int> order = rank_nodes(table, criterion);
    order.resize(static_cast<std::size_t>(m));
    return {std::move(order), strategy, std::nullopt};
}

DriverSet select_drivers(const Network& net, Strategy strategy, int m, const GramianSpec& spec,
                         std::optional<std::uint64_t> seed) {
    if (strategy == Strategy::random) {
        check_m(m, net.size());
        return random_drivers(net.size(), m, seed);
    }
    return select_drivers(compute_centralities(net, spec), strategy, m, seed);
}

namespace {

std::vector<int> checked_sorted_set(const std::vector<int>& nodes, int n, const char* what) {
    if (nodes.empty()) throw ValidationError(std::string(what) + " set must be non-empty");
    std::vector<int> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= n) {
        throw ValidationError(std::string(what) + " set index out of range 1.." + std::to_string(n));
    }
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError(std::string(what) + " set contains a repeated node");
    }
    return sorted;
}

}  // namespace

double net_energy_flow(const Network& net, const std::vector<int>& from_set,
                       const std::vector<int>& to_set, const GramianSpec& spec) {
    spec.validate();
    const std::vector<int> from_sorted = checked_sorted_set(from_set, net.size(), "source");
    const std::vector<int> to_sorted = checked_sorted_set(to_set, net.size(), "destination");
    // Flow is antisymmetric in the sets, so equal sets yield zero
    // identically; skip the arithmetic rather than round-trip through it.
    if (from_sorted == to_sorted) return 0.0;

    std::vector<int> nodes = from_sorted;
    nodes.insert(nodes.end(), to_sorted.begin(), to_sorted.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    // One single-driver Gramian per distinct node; its diagonal is that
    // node's outgoing flow to everyone.
    std::vector<Eigen::VectorXd> outflow(static_cast<std::size_t>(net.size()));
    for (int node : nodes) {
        outflow[static_cast<std::size_t>(node)] =
            ctrb_gramian(net, {node}, spec).mat.diagonal();
    }

    double total = 0.0;
    for (int i : from_set) {
        for (int j : to_set) {
            total += outflow[static_cast<std::size_t>(i)](j) - outflow[static_cast<std::size_t>(j)](i);
        }
    }
    return total;
}

Eigen::VectorXd commutator_diagonal(const Network& net, int t_end) {
    if (t_end < 1) throw ValidationError("commutator horizon must be at least 1");
    const int n = net.size();
    const Eigen::MatrixXd& a = net.adjacency();
    // Diagonal of [(A')^t, A^t] at node i is (column norm)^2 - (row norm)^2
    // of A^t; the t = 0 term vanishes.
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd p = a;
    for (int t = 1; t < t_end; ++t) {
        if (t > 1) p = (a * p).eval();
        acc += p.cwiseAbs2().colwise().sum().transpose();
        acc -= p.cwiseAbs2().rowwise().sum();
    }
    return acc;
}

void write_centrality_csv(const CentralityTable& table, std::ostream& out) {
    out << "node,p,q,q_tilde,r_diff,r_quot\n";
    char buf[512];
    for (int i = 0; i < table.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", i + 1, table.p(i),
                      table.q(i), table.q_tilde(i), table.r_diff(i), table.r_quot(i));
        out << buf;
    }
}

}  // namespace gramcent
