#include "gramcent/control.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

namespace gramcent {

namespace {

constexpr double kPsdSlack = 1e-9;   // relative, against the trace
constexpr double kRankTol = 1e-12;   // relative, against the trace
constexpr double kJitter = 1e-12;    // relative, for the Cholesky fallback

// Solves W z = rhs for a symmetric positive definite W, retrying once with
// jittered diagonal when the factorization stalls on roundoff.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& w, const Eigen::VectorXd& rhs) {
    Eigen::LLT<Eigen::MatrixXd> llt(w);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
    const double jitter = kJitter * w.trace();
    Eigen::MatrixXd padded = w;
    padded.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> retry(padded);
    if (retry.info() != Eigen::Success) {
        throw NumericError("Gramian Cholesky factorization failed even with jitter");
    }
    return retry.solve(rhs);
}

}  // namespace

CtrlMetrics metrics(const Gramian& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram.mat, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("Gramian eigendecomposition failed");
    }
    Eigen::VectorXd spectrum = solver.eigenvalues();  // ascending
    const double trace = spectrum.sum();
    if (spectrum(0) < -kPsdSlack * std::max(trace, 1.0)) {
        throw NumericError("Gramian is not positive semidefinite: lambda_min = " +
                           std::to_string(spectrum(0)));
    }
    for (int i = 0; i < spectrum.size(); ++i) {
        if (spectrum(i) < 0.0) spectrum(i) = 0.0;
    }

    CtrlMetrics result;
    result.trace_w = spectrum.sum();
    result.lambda_min = spectrum(0);
    result.controllable = result.lambda_min > kRankTol * result.trace_w;
    result.spectrum = std::move(spectrum);
    return result;
}

ControlPlan min_energy_input(const Network& net, const std::vector<int>& drivers, int t_end,
                             const Eigen::VectorXd& x_f) {
    if (t_end < 1) throw ValidationError("steering horizon must be at least 1");
    if (x_f.size() != net.size()) {
        throw ValidationError("target state dimension does not match the network");
    }
    const Gramian gram = ctrb_gramian(net, drivers, GramianSpec::finite(t_end));
    const CtrlMetrics spec_metrics = metrics(gram);
    if (!spec_metrics.controllable) {
        throw SingularGramianError(
            "network is not controllable from these drivers at this horizon (lambda_min = " +
                std::to_string(spec_metrics.lambda_min) + ")",
            spec_metrics.lambda_min);
    }

    const Eigen::VectorXd z = spd_solve(gram.mat, x_f);
    const auto m = static_cast<Eigen::Index>(drivers.size());

    // u(t) = B' (A')^(T-1-t) W^{-1} x_f; walk w = (A')^s z upward in s while
    // filling rows from the end.
    ControlPlan plan;
    plan.input_sequence.resize(t_end, m);
    Eigen::VectorXd w = z;
    for (int t = t_end - 1; t >= 0; --t) {
        for (Eigen::Index k = 0; k < m; ++k) {
            plan.input_sequence(t, k) = w(drivers[static_cast<std::size_t>(k)]);
        }
        if (t > 0) w = (net.adjacency().transpose() * w).eval();
    }
    plan.energy = x_f.dot(z);
    if (plan.energy < 0.0) plan.energy = 0.0;  // roundoff on a quadratic form
    plan.target_state = x_f;
    return plan;
}

TargetControl target_min_energy(const Network& net, const std::vector<int>& drivers,
                                const GramianSpec& spec, int target) {
    if (target < 0 || target >= net.size()) {
        throw ValidationError("target node out of range 1.." + std::to_string(net.size()));
    }
    const Gramian gram = ctrb_gramian(net, drivers, spec);
    const double w_tt = gram.mat(target, target);
    const double floor = kRankTol * std::max(gram.mat.trace(), 1.0);
    if (w_tt <= floor) {
        throw TargetUnreachableError("target node " + std::to_string(target + 1) +
                                         " receives no energy from these drivers",
                                     w_tt);
    }
    TargetControl result;
    result.energy = 1.0 / w_tt;
    result.optimal_state = gram.mat.col(target) / w_tt;
    return result;
}

DriverSet best_drivers_for_target(const Network& net, int target, int m, const GramianSpec& spec) {
    if (target < 0 || target >= net.size()) {
        throw ValidationError("target node out of range 1.." + std::to_string(net.size()));
    }
    if (m < 1 || m > net.size()) {
        throw ValidationError("driver count must lie in 1.." + std::to_string(net.size()));
    }
    // Diagonal entry k of the single-probe observability Gramian is the flow
    // from node k into the target; the top-m set maximizes W_tt over all
    // m-subsets because W_tt is exactly the selected flows' sum.
    const Gramian obs = obsv_gramian(net, {target}, spec);
    const Eigen::VectorXd inflow = obs.mat.diagonal();

    std::vector<int> order(static_cast<std::size_t>(net.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&inflow](int a, int b) {
        if (inflow(a) != inflow(b)) return inflow(a) > inflow(b);
        return a < b;
    });
    order.resize(static_cast<std::size_t>(m));
    return {std::move(order), Strategy::target_flow, std::nullopt};
}

double lambda_min_upper_bound(const CentralityTable& table, int m) {
    if (m < 1 || m >= table.size()) {
        throw ValidationError("bound needs 1 <= m < n, got m = " + std::to_string(m));
    }
    std::vector<double> sorted(table.q_tilde.data(), table.q_tilde.data() + table.q_tilde.size());
    std::sort(sorted.begin(), sorted.end());
    return sorted[static_cast<std::size_t>(m)];  // (m+1)-th smallest
}

Eigen::VectorXd simulate(const Network& net, const std::vector<int>& drivers,
                         const Eigen::MatrixXd& inputs) {
    if (inputs.cols() != static_cast<Eigen::Index>(drivers.size())) {
        throw ValidationError("input columns must match the driver count");
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(net.size());
    for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
        x = (net.adjacency() * x).eval();
        for (Eigen::Index k = 0; k < inputs.cols(); ++k) {
            x(drivers[static_cast<std::size_t>(k)]) += inputs(t, k);
        }
    }
    return x;
}

void write_plan_csv(const ControlPlan& plan, std::ostream& out) {
    out << "t";
    for (Eigen::Index k = 0; k < plan.input_sequence.cols(); ++k) out << ",u_" << (k + 1);
    out << "\n";
    char buf[64];
    for (Eigen::Index t = 0; t < plan.input_sequence.rows(); ++t) {
        out << t;
        for (Eigen::Index k = 0; k < plan.input_sequence.cols(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", plan.input_sequence(t, k));
            out << "," << buf;
        }
        out << "\n";
    }
}

std::string metrics_json(const CtrlMetrics& m) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "{\"trace\": %.17g, \"lambda_min\": %.17g, \"controllable\": %s}",
                  m.trace_w, m.lambda_min, m.controllable ? "true" : "false");
    return std::string(buf);
}

}  // namespace gramcent
