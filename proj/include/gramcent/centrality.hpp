#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "gramcent/gramian.hpp"

namespace gramcent {

/// Per-node control-energy centralities over a common horizon.
///
/// p: energy a node injects into the network when it is the sole driver
///    (trace of its controllability Gramian).
/// q: energy the network injects into a node across all drivers (diagonal
///    of the full-support controllability Gramian).
/// q_tilde: q minus the node's self flow, the share received from others.
/// r_diff: p - q (sums to zero over the network).
/// r_quot: p / q.
struct CentralityTable {
    Eigen::VectorXd p;
    Eigen::VectorXd q;
    Eigen::VectorXd q_tilde;
    Eigen::VectorXd r_diff;
    Eigen::VectorXd r_quot;
    GramianSpec spec;

    int size() const { return static_cast<int>(p.size()); }
};

/// All five centralities from one pair of full-support Gramian solves plus
/// one diagonal-power recursion, never from n per-node solves.
CentralityTable compute_centralities(const Network& net, const GramianSpec& spec);

/// Orderings derived from the table. Descending score; ties break toward the
/// smaller node index.
enum class RankCriterion { rank_diff, rank_quot, p_only };
std::vector<int> rank_nodes(const CentralityTable& table, RankCriterion criterion);

/// Driver-placement strategies. target_flow marks sets chosen for a single
/// target node and is produced only by best_drivers_for_target.
enum class Strategy { rank_diff, rank_quot, trace_max, random, target_flow };

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

/// A chosen driver set; members keep selection order (rank order, or the
/// shuffled order for random placement).
struct DriverSet {
    std::vector<int> members;
    Strategy strategy;
    std::optional<std::uint64_t> seed;  // set for random placement only

    int m() const { return static_cast<int>(members.size()); }
};

/// Picks m drivers by strategy. The random strategy requires a seed and
/// ignores the table; the prefix property holds (the same seed's m-set is a
/// prefix of its (m+1)-set).
DriverSet select_drivers(const CentralityTable& table, Strategy strategy, int m,
                         std::optional<std::uint64_t> seed = std::nullopt);
DriverSet select_drivers(const Network& net, Strategy strategy, int m, const GramianSpec& spec,
                         std::optional<std::uint64_t> seed = std::nullopt);

/// Net directed energy flow from one node set to another: the sum over
/// pairs of (flow there minus flow back). Equal sets give exactly zero.
double net_energy_flow(const Network& net, const std::vector<int>& from_set,
                       const std::vector<int>& to_set, const GramianSpec& spec);

/// Diagonal of the accumulated commutator sum_t [(A')^t, A^t], which equals
/// r_diff over the same horizon. Kept separate as an independent route for
/// cross-checking.
Eigen::VectorXd commutator_diagonal(const Network& net, int t_end);

/// CSV with header node,p,q,q_tilde,r_diff,r_quot, node ids 1-based, values
/// at 17 significant digits, LF line endings.
void write_centrality_csv(const CentralityTable& table, std::ostream& out);

}  // namespace gramcent
