#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "gramcent/control.hpp"
#include "gramcent/expharness.hpp"
#include "gramcent/matrix_io.hpp"

namespace gramcent {

namespace {

// --horizon accepts "inf" or a positive step count; an empty string means
// "not given" and is resolved by the subcommand.
std::optional<int> parse_horizon(const std::string& text) {
    if (text == "inf") return std::nullopt;
    try {
        std::size_t pos = 0;
        const int t = std::stoi(text, &pos);
        if (pos == text.size() && t >= 1) return t;
    } catch (const std::exception&) {
    }
    throw ValidationError("--horizon must be 'inf' or a positive integer, got '" + text + "'");
}

GramianSpec resolve_spec(const Network& net, const std::string& horizon_text, double tol) {
    GramianSpec spec;
    spec.lyap_tol = tol;
    if (horizon_text.empty()) {
        if (!net.stable()) {
            throw ValidationError(
                "network is unstable (spectral radius " + std::to_string(net.spectral_radius()) +
                "); pass --horizon T to analyze over a finite horizon");
        }
        return spec;
    }
    spec.horizon = parse_horizon(horizon_text);
    return spec;
}

void print_id_line(const char* label, const std::vector<int>& nodes) {
    std::cout << label;
    for (int v : nodes) std::cout << " " << (v + 1);
    std::cout << "\n";
}

char format_buf[48];
const char* fmt17(double v) {
    std::snprintf(format_buf, sizeof(format_buf), "%.17g", v);
    return format_buf;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Control-energy centralities and driver placement for weighted directed networks"};
    app.set_version_flag("--version", std::string(artifact_version));
    app.require_subcommand(1);

    std::string file, horizon_text, strategy_name_text, out_dir = ".";
    double tol = 1e-12;
    int m = 1, node = 1, threads = -1;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("file", file, "network file (dense matrix or 'n=' edge list)")->required();
        cmd->add_option("--horizon", horizon_text, "'inf' or a step count (default: inf)");
        cmd->add_option("--tol", tol, "infinite-horizon solver tolerance")
            ->default_val(1e-12);
    };

    CLI::App* analyze = app.add_subcommand("analyze", "Per-node centralities as CSV on stdout");
    add_common(analyze);

    CLI::App* drivers_cmd = app.add_subcommand("drivers", "Select a driver set and report its Gramian");
    add_common(drivers_cmd);
    drivers_cmd->add_option("--strategy", strategy_name_text,
                            "rank_diff | rank_quot | trace_max | random")
        ->required();
    drivers_cmd->add_option("--m", m, "number of drivers")->required();
    drivers_cmd->add_option("--seed", seed, "seed for random placement")
        ->each([&](const std::string&) { seed_given = true; });

    CLI::App* bound_cmd = app.add_subcommand("bound", "Spectral upper bound for m-driver Gramians");
    add_common(bound_cmd);
    bound_cmd->add_option("--m", m, "number of drivers")->required();

    CLI::App* target_cmd =
        app.add_subcommand("target", "Best drivers and energy for exciting one node");
    add_common(target_cmd);
    target_cmd->add_option("--node", node, "target node id (1-based)")->required();
    target_cmd->add_option("--m", m, "number of drivers")->required();

    CLI::App* experiment = app.add_subcommand("experiment", "Run a random-network experiment");
    std::string config_path;
    experiment->add_option("config", config_path, "experiment config (JSON)")->required();
    experiment->add_option("--out", out_dir, "output directory")->capture_default_str();
    std::string exp_horizon;
    double exp_tol = -1.0;
    std::uint64_t exp_seed = 0;
    bool exp_seed_given = false;
    experiment->add_option("--horizon", exp_horizon, "override the config horizon");
    experiment->add_option("--tol", exp_tol, "override the solver tolerance");
    experiment->add_option("--seed", exp_seed, "override the base seed")
        ->each([&](const std::string&) { exp_seed_given = true; });
    experiment->add_option("--threads", threads, "override the worker count");

    try {
        app.parse(argc, argv);

        if (analyze->parsed()) {
            const Network net = read_network(file);
            const GramianSpec spec = resolve_spec(net, horizon_text, tol);
            const CentralityTable table = compute_centralities(net, spec);
            write_centrality_csv(table, std::cout);
            print_id_line("# rank_diff:", rank_nodes(table, RankCriterion::rank_diff));
            print_id_line("# rank_quot:", rank_nodes(table, RankCriterion::rank_quot));
        } else if (drivers_cmd->parsed()) {
            const Network net = read_network(file);
            const GramianSpec spec = resolve_spec(net, horizon_text, tol);
            const auto strategy = strategy_from_name(strategy_name_text);
            if (!strategy.has_value()) {
                throw ValidationError("unknown strategy '" + strategy_name_text + "'");
            }
            const std::optional<std::uint64_t> maybe_seed =
                seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt;
            const DriverSet set = select_drivers(net, *strategy, m, spec, maybe_seed);
            print_id_line("drivers:", set.members);
            std::cout << metrics_json(metrics(ctrb_gramian(net, set.members, spec))) << "\n";
        } else if (bound_cmd->parsed()) {
            const Network net = read_network(file);
            const GramianSpec spec = resolve_spec(net, horizon_text, tol);
            const CentralityTable table = compute_centralities(net, spec);
            std::cout << fmt17(lambda_min_upper_bound(table, m)) << "\n";
        } else if (target_cmd->parsed()) {
            const Network net = read_network(file);
            const GramianSpec spec = resolve_spec(net, horizon_text, tol);
            if (node < 1 || node > net.size()) {
                throw ValidationError("--node must lie in 1.." + std::to_string(net.size()));
            }
            const DriverSet set = best_drivers_for_target(net, node - 1, m, spec);
            const TargetControl control = target_min_energy(net, set.members, spec, node - 1);
            print_id_line("drivers:", set.members);
            std::cout << "energy: " << fmt17(control.energy) << "\n";
        } else if (experiment->parsed()) {
            ExperimentConfig config = ExperimentConfig::from_json_file(config_path);
            if (exp_seed_given) config.base_seed = exp_seed;
            if (!exp_horizon.empty()) config.gramian.horizon = parse_horizon(exp_horizon);
            if (exp_tol > 0.0) config.gramian.lyap_tol = exp_tol;
            if (threads >= 0) config.threads = threads;
            const ExperimentResult result = run_experiment(config);
            for (const auto& path : emit_csv(result, out_dir)) {
                std::cout << path.string() << "\n";
            }
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace gramcent
