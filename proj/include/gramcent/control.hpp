#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "gramcent/centrality.hpp"
#include "gramcent/gramian.hpp"

namespace gramcent {

/// Spectral summary of a Gramian.
struct CtrlMetrics {
    double trace_w;
    double lambda_min;
    Eigen::VectorXd spectrum;  // ascending, negatives clamped to zero
    bool controllable;         // lambda_min above the rank tolerance
};

/// Eigen-decomposes the Gramian. Eigenvalues below zero by more than
/// 1e-9 * trace indicate a broken input and raise a numeric error; small
/// negatives are clamped. The rank tolerance is 1e-12 * trace.
CtrlMetrics metrics(const Gramian& gram);

/// Minimum-energy open-loop input steering the state from the origin to
/// x_f in exactly T steps.
struct ControlPlan {
    Eigen::MatrixXd input_sequence;  // T rows, one per step, m columns
    double energy;                   // sum of squared input entries
    Eigen::VectorXd target_state;
};
ControlPlan min_energy_input(const Network& net, const std::vector<int>& drivers, int t_end,
                             const Eigen::VectorXd& x_f);

/// Cheapest unit excitation of one coordinate: minimum energy over all final
/// states with x_target = 1. Energy is 1 / W_tt; the optimal final state is
/// the target column of W scaled by 1 / W_tt (so its target entry is 1).
struct TargetControl {
    double energy;
    Eigen::VectorXd optimal_state;
};
TargetControl target_min_energy(const Network& net, const std::vector<int>& drivers,
                                const GramianSpec& spec, int target);

/// The m nodes whose flow into the target is largest, which minimizes the
/// single-target energy over all m-subsets. One observability solve gives
/// every candidate's flow; ties break toward the smaller index.
DriverSet best_drivers_for_target(const Network& net, int target, int m, const GramianSpec& spec);

/// Upper bound on lambda_min of any m-driver Gramian: the (m+1)-th smallest
/// received-flow centrality.
double lambda_min_upper_bound(const CentralityTable& table, int m);

/// Runs the dynamics from the origin under the given input rows; returns the
/// final state. Validation helper for steering plans.
Eigen::VectorXd simulate(const Network& net, const std::vector<int>& drivers,
                         const Eigen::MatrixXd& inputs);

/// CSV with header t,u_1,...,u_m; one row per step, 17 significant digits.
void write_plan_csv(const ControlPlan& plan, std::ostream& out);

/// One-line JSON {"trace": ..., "lambda_min": ..., "controllable": ...}.
std::string metrics_json(const CtrlMetrics& metrics);

}  // namespace gramcent
