#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gramcent/control.hpp"
#include "gramcent/rng.hpp"
#include "oracles.hpp"

using namespace gramcent;

namespace {

Network chain2() {
    Eigen::MatrixXd a(2, 2);
    a << 0, 0, 0.5, 0;
    return Network(a);
}

Network cycle4() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a(1, 0) = 0.5;
    a(2, 1) = 0.5;
    a(3, 2) = 0.5;
    a(0, 3) = 0.5;
    return Network(a);
}

Network random_stable(Rng& rng, int n, double density) {
    Eigen::MatrixXd a = oracle::random_net(rng, n, density, false);
    a(n - 1, n - 1) = 0.6;
    return rescale_to_radius(Network(a), 0.9);
}

}  // namespace

TEST_CASE("metrics of the 2-chain Gramian") {
    const Gramian gram = ctrb_gramian(chain2(), {0}, GramianSpec::finite(3));
    const CtrlMetrics m = metrics(gram);
    CHECK(m.trace_w == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(m.lambda_min == doctest::Approx(0.25).epsilon(1e-14));
    REQUIRE(m.spectrum.size() == 2);
    CHECK(m.spectrum(0) <= m.spectrum(1));  // ascending
    CHECK(m.controllable);

    const Gramian sink = ctrb_gramian(chain2(), {1}, GramianSpec::finite(3));
    const CtrlMetrics ms = metrics(sink);
    CHECK(ms.lambda_min <= 1e-12);
    CHECK_FALSE(ms.controllable);
}

TEST_CASE("metrics rejects an indefinite matrix but clamps roundoff negatives") {
    Eigen::MatrixXd bad(2, 2);
    bad << -1, 0, 0, 1;
    CHECK_THROWS_AS(metrics(Gramian{bad, {0}, GramianSpec::finite(2)}), NumericError);

    Eigen::MatrixXd near(2, 2);
    near << -1e-13, 0, 0, 1;
    const CtrlMetrics m = metrics(Gramian{near, {0}, GramianSpec::finite(2)});
    CHECK(m.lambda_min == 0.0);
    CHECK_FALSE(m.controllable);
}

TEST_CASE("minimum-energy steering on the 2-chain is exact") {
    const Eigen::VectorXd x_f = (Eigen::VectorXd(2) << 0, 1).finished();
    const ControlPlan plan = min_energy_input(chain2(), {0}, 3, x_f);
    REQUIRE(plan.input_sequence.rows() == 3);
    REQUIRE(plan.input_sequence.cols() == 1);
    CHECK(plan.input_sequence(0, 0) == 0.0);
    CHECK(plan.input_sequence(1, 0) == 2.0);
    CHECK(plan.input_sequence(2, 0) == 0.0);
    CHECK(plan.energy == 4.0);
    CHECK((plan.target_state - x_f).norm() == 0.0);

    const Eigen::VectorXd reached = simulate(chain2(), {0}, plan.input_sequence);
    CHECK(reached(0) == 0.0);
    CHECK(reached(1) == 1.0);
}

TEST_CASE("steering matches the stacked least-norm oracle and reaches the state") {
    Rng rng(777);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_index(3));
        const Network net = random_stable(rng, n, 0.5);
        // Full driver support keeps the Gramian well conditioned, so both
        // routes compute the same unique least-norm input.
        std::vector<int> drivers(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) drivers[static_cast<std::size_t>(i)] = i;
        const int t_end = n + 1 + static_cast<int>(rng.uniform_index(3));
        Eigen::VectorXd x_f(n);
        for (int i = 0; i < n; ++i) x_f(i) = rng.normal();

        const ControlPlan plan = min_energy_input(net, drivers, t_end, x_f);
        const auto [u_ref, energy_ref] =
            oracle::least_norm_steering(net.adjacency(), drivers, t_end, x_f);
        CHECK(plan.energy == doctest::Approx(energy_ref).epsilon(1e-8));
        for (int t = 0; t < t_end; ++t) {
            for (int k = 0; k < n; ++k) {
                CHECK(plan.input_sequence(t, k) ==
                      doctest::Approx(u_ref(t * n + k)).epsilon(1e-7).scale(1.0));
            }
        }
        const Eigen::VectorXd reached = simulate(net, drivers, plan.input_sequence);
        CHECK((reached - x_f).norm() <= 1e-9 * std::max(1.0, x_f.norm()));
    }
}

TEST_CASE("steering from a single driver around a cycle") {
    const Network net = cycle4();
    Eigen::VectorXd x_f(4);
    x_f << 0.3, -0.2, 0.1, 0.4;
    const ControlPlan plan = min_energy_input(net, {0}, 4, x_f);
    const auto [u_ref, energy_ref] = oracle::least_norm_steering(net.adjacency(), {0}, 4, x_f);
    CHECK(plan.energy == doctest::Approx(energy_ref).epsilon(1e-10));
    const Eigen::VectorXd reached = simulate(net, {0}, plan.input_sequence);
    CHECK((reached - x_f).norm() <= 1e-10);
}

TEST_CASE("steering failure modes") {
    const Eigen::VectorXd x_f = (Eigen::VectorXd(2) << 1, 0).finished();
    CHECK_THROWS_AS(min_energy_input(chain2(), {1}, 3, x_f), SingularGramianError);
    try {
        min_energy_input(chain2(), {1}, 3, x_f);
    } catch (const SingularGramianError& err) {
        CHECK(err.lambda_min <= 1e-12);
    }
    CHECK_THROWS_AS(min_energy_input(chain2(), {0}, 0, x_f), ValidationError);
    CHECK_THROWS_AS(min_energy_input(chain2(), {0}, 3, Eigen::VectorXd::Zero(3)), ValidationError);
    CHECK_THROWS_AS(min_energy_input(chain2(), {2}, 3, x_f), ValidationError);

    const ControlPlan rest = min_energy_input(chain2(), {0}, 3, Eigen::VectorXd::Zero(2));
    CHECK(rest.energy == 0.0);
    CHECK(rest.input_sequence.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-target steering on the 2-chain") {
    for (const GramianSpec& spec : {GramianSpec::finite(3), GramianSpec::infinite()}) {
        const TargetControl tc = target_min_energy(chain2(), {0}, spec, 1);
        CHECK(tc.energy == 4.0);
        CHECK(tc.optimal_state(0) == 0.0);
        CHECK(tc.optimal_state(1) == 1.0);
    }
    CHECK_THROWS_AS(target_min_energy(chain2(), {1}, GramianSpec::finite(3), 0),
                    TargetUnreachableError);
    try {
        target_min_energy(chain2(), {1}, GramianSpec::finite(3), 0);
    } catch (const TargetUnreachableError& err) {
        CHECK(err.gram_diag <= 1e-12);
    }
    CHECK_THROWS_AS(target_min_energy(chain2(), {0}, GramianSpec::finite(3), 2), ValidationError);
}

TEST_CASE("single-target energy is the Gramian diagonal reciprocal and is attained") {
    Rng rng(888);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_index(3));
        const Network net = random_stable(rng, n, 0.5);
        const int t_end = n + 2;
        const int target = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
        std::vector<int> drivers(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) drivers[static_cast<std::size_t>(i)] = i;

        const TargetControl tc = target_min_energy(net, drivers, GramianSpec::finite(t_end), target);
        const Eigen::MatrixXd w_ref = oracle::ctrb_brute(net.adjacency(), drivers, t_end);
        CHECK(tc.energy == doctest::Approx(1.0 / w_ref(target, target)).epsilon(1e-10));
        CHECK(tc.optimal_state(target) == 1.0);

        // The optimal state's full-steering cost equals the target cost, and
        // any other unit-target state costs at least as much.
        const double attained = min_energy_input(net, drivers, t_end, tc.optimal_state).energy;
        CHECK(attained == doctest::Approx(tc.energy).epsilon(1e-9));
        Eigen::VectorXd other = tc.optimal_state;
        other((target + 1) % n) += 0.37;
        const double perturbed = min_energy_input(net, drivers, t_end, other).energy;
        CHECK(perturbed >= attained - 1e-12 * std::max(1.0, attained));
    }
}

TEST_CASE("best target drivers: threefold tie resolves toward the smallest index") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(1, 0) = 1.0;
    a(2, 1) = 1.0;
    const Network net(a);
    // Flows into node 3 over horizon 3 are 1 from every node, so value order
    // alone cannot separate them and the index tie-break decides.
    const DriverSet one = best_drivers_for_target(net, 2, 1, GramianSpec::finite(3));
    CHECK(one.members == std::vector<int>{0});
    CHECK(one.strategy == Strategy::target_flow);
    CHECK_FALSE(one.seed.has_value());
    const DriverSet two = best_drivers_for_target(net, 2, 2, GramianSpec::finite(3));
    CHECK(two.members == std::vector<int>{0, 1});

    CHECK_THROWS_AS(best_drivers_for_target(net, 3, 1, GramianSpec::finite(3)), ValidationError);
    CHECK_THROWS_AS(best_drivers_for_target(net, 0, 0, GramianSpec::finite(3)), ValidationError);
}

TEST_CASE("best target drivers maximize the target diagonal over all subsets") {
    Rng rng(999);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 5;
        const Network net = random_stable(rng, n, 0.5);
        const int t_end = 6;
        const int target = static_cast<int>(rng.uniform_index(n));
        for (int m = 1; m <= 3; ++m) {
            const DriverSet chosen = best_drivers_for_target(net, target, m, GramianSpec::finite(t_end));
            const double chosen_value =
                oracle::ctrb_brute(net.adjacency(), chosen.members, t_end)(target, target);
            double best_value = 0.0;
            for (const std::vector<int>& subset : oracle::subsets(n, m)) {
                best_value = std::max(
                    best_value, oracle::ctrb_brute(net.adjacency(), subset, t_end)(target, target));
            }
            CHECK(chosen_value >= best_value - 1e-12 * std::max(1.0, best_value));
        }
    }
}

TEST_CASE("lambda_min bound: chain value and validation") {
    const CentralityTable t = compute_centralities(chain2(), GramianSpec::finite(3));
    CHECK(lambda_min_upper_bound(t, 1) == 0.25);
    CHECK_THROWS_AS(lambda_min_upper_bound(t, 0), ValidationError);
    CHECK_THROWS_AS(lambda_min_upper_bound(t, 2), ValidationError);
}

TEST_CASE("lambda_min bound dominates every driver set of its size") {
    Rng rng(1234);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 6;
        const Network net = random_stable(rng, n, 0.5);
        const GramianSpec spec = GramianSpec::infinite();
        const CentralityTable table = compute_centralities(net, spec);
        for (int m = 1; m < n; ++m) {
            const double bound = lambda_min_upper_bound(table, m);
            for (const std::vector<int>& subset : oracle::subsets(n, m)) {
                const double lam = metrics(ctrb_gramian(net, subset, spec)).lambda_min;
                CHECK(lam <= bound + 1e-9 * std::max(1.0, std::abs(bound)));
            }
        }
    }
}

TEST_CASE("plan CSV and metrics JSON bytes are pinned") {
    const Eigen::VectorXd x_f = (Eigen::VectorXd(2) << 0, 1).finished();
    const ControlPlan plan = min_energy_input(chain2(), {0}, 3, x_f);
    std::ostringstream out;
    write_plan_csv(plan, out);
    CHECK(out.str() == "t,u_1\n0,0\n1,2\n2,0\n");

    CtrlMetrics m;
    m.trace_w = 1.25;
    m.lambda_min = 0.25;
    m.spectrum = (Eigen::VectorXd(2) << 0.25, 1.0).finished();
    m.controllable = true;
    CHECK(metrics_json(m) == "{\"trace\": 1.25, \"lambda_min\": 0.25, \"controllable\": true}");
}
