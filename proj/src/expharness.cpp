#include "gramcent/expharness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "gramcent/control.hpp"
#include "gramcent/gramian.hpp"

namespace gramcent {

const char* const artifact_version = "gramcent 0.1.0";

namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ValidationError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <typename T>
T require(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ValidationError("missing key '" + std::string(key) + "' in " + where);
    }
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError("key '" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

template <typename T>
T optional_or(const ordered_json& obj, const char* key, const std::string& where, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError("key '" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

GeneratorParams generator_from_json(const ordered_json& obj) {
    const std::string where = "generator";
    const auto kind = require<std::string>(obj, "kind", where);
    GeneratorParams params;
    if (kind == "erdos_renyi") {
        check_keys(obj, {"kind", "n", "edge_prob", "target_rho"}, where);
        params.kind = GeneratorParams::Kind::erdos_renyi;
        params.n = require<int>(obj, "n", where);
        params.edge_prob = require<double>(obj, "edge_prob", where);
    } else if (kind == "directed_scale_free") {
        check_keys(obj,
                   {"kind", "n", "alpha", "beta", "gamma", "delta_in", "delta_out", "target_rho"},
                   where);
        params.kind = GeneratorParams::Kind::directed_scale_free;
        params.n = require<int>(obj, "n", where);
        params.sf_alpha = optional_or(obj, "alpha", where, params.sf_alpha);
        params.sf_beta = optional_or(obj, "beta", where, params.sf_beta);
        params.sf_gamma = optional_or(obj, "gamma", where, params.sf_gamma);
        params.sf_delta_in = optional_or(obj, "delta_in", where, params.sf_delta_in);
        params.sf_delta_out = optional_or(obj, "delta_out", where, params.sf_delta_out);
    } else {
        throw ValidationError("unknown generator kind '" + kind + "'");
    }
    params.target_rho = optional_or(obj, "target_rho", where, params.target_rho);
    return params;
}

ordered_json generator_to_json(const GeneratorParams& params) {
    ordered_json obj;
    if (params.kind == GeneratorParams::Kind::erdos_renyi) {
        obj["kind"] = "erdos_renyi";
        obj["n"] = params.n;
        obj["edge_prob"] = params.edge_prob;
    } else {
        obj["kind"] = "directed_scale_free";
        obj["n"] = params.n;
        obj["alpha"] = params.sf_alpha;
        obj["beta"] = params.sf_beta;
        obj["gamma"] = params.sf_gamma;
        obj["delta_in"] = params.sf_delta_in;
        obj["delta_out"] = params.sf_delta_out;
    }
    obj["target_rho"] = params.target_rho;
    return obj;
}

// Per-realization measurements, kept whole until every realization finished
// so aggregation order never depends on thread scheduling.
struct Record {
    std::vector<std::vector<double>> trace;   // [strategy][m index]
    std::vector<std::vector<double>> lmin;    // [strategy][m index]
    std::vector<double> bound;                // [m index]
    std::vector<Eigen::VectorXd> spectrum;    // [strategy]
    Eigen::VectorXd sorted_p, sorted_q, sorted_qtilde;
};

Eigen::VectorXd sorted_descending(const Eigen::VectorXd& v) {
    Eigen::VectorXd out = v;
    std::sort(out.data(), out.data() + out.size(), std::greater<double>());
    return out;
}

Record run_one(const ExperimentConfig& config, int realization) {
    GeneratorParams params = config.generator;
    params.seed = config.base_seed ^ static_cast<std::uint64_t>(realization);
    const GeneratedNetwork gen = generate_network(params);
    const Network& net = gen.network;
    const int n = net.size();

    const CentralityTable table = compute_centralities(net, config.gramian);
    std::vector<double> qtilde_sorted(table.q_tilde.data(), table.q_tilde.data() + n);
    std::sort(qtilde_sorted.begin(), qtilde_sorted.end());

    const std::size_t n_strategies = config.strategies.size();
    Record rec;
    rec.trace.assign(n_strategies, std::vector<double>(config.m_grid.size(), 0.0));
    rec.lmin.assign(n_strategies, std::vector<double>(config.m_grid.size(), 0.0));
    rec.bound.assign(config.m_grid.size(), std::numeric_limits<double>::quiet_NaN());
    if (config.outputs.spectrum_at_m) rec.spectrum.resize(n_strategies);
    if (config.outputs.centrality_profile) {
        rec.sorted_p = sorted_descending(table.p);
        rec.sorted_q = sorted_descending(table.q);
        rec.sorted_qtilde = sorted_descending(table.q_tilde);
    }
    for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi) {
        const int m = config.m_grid[mi];
        if (m < n) rec.bound[mi] = qtilde_sorted[static_cast<std::size_t>(m)];
    }

    // One solver per realization: the power ladder of A is shared by every
    // driver-set solve below.
    std::optional<DiscreteLyapunovSolver> solver;
    if (config.gramian.is_infinite()) {
        solver.emplace(net.adjacency(), config.gramian.lyap_tol, config.gramian.lyap_max_iter);
    }
    auto gramian_for = [&](const std::vector<int>& members) {
        if (solver.has_value()) {
            Eigen::MatrixXd w = solver->solve_indicator(members);
            w = (0.5 * (w + w.transpose())).eval();
            return Gramian{std::move(w), members, config.gramian};
        }
        return ctrb_gramian(net, members, config.gramian);
    };

    for (std::size_t si = 0; si < n_strategies; ++si) {
        const Strategy strategy = config.strategies[si];
        // Selecting n drivers yields the full preference order; every grid
        // point is a prefix of it (rank order, or the seeded permutation).
        const DriverSet full = select_drivers(table, strategy, n, params.seed);

        for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi) {
            const int m = config.m_grid[mi];
            const std::vector<int> members(full.members.begin(), full.members.begin() + m);
            const CtrlMetrics met = metrics(gramian_for(members));
            rec.trace[si][mi] = met.trace_w;
            rec.lmin[si][mi] = met.lambda_min;
            if (m < n) {
                // Spectral bound: lambda_min of any m-driver Gramian sits at
                // or below the (m+1)-th smallest received flow.
                const double bound = rec.bound[mi];
                if (met.lambda_min > bound + 1e-9 * std::max(1.0, std::abs(bound))) {
                    throw NumericError("spectral bound violated: lambda_min " +
                                       std::to_string(met.lambda_min) + " > " +
                                       std::to_string(bound) + " at m = " + std::to_string(m));
                }
            }
            if (config.outputs.spectrum_at_m && m == config.spectrum_m) {
                rec.spectrum[si] = met.spectrum;
            }
        }
        if (config.outputs.spectrum_at_m &&
            std::find(config.m_grid.begin(), config.m_grid.end(), config.spectrum_m) ==
                config.m_grid.end()) {
            const std::vector<int> members(full.members.begin(),
                                           full.members.begin() + config.spectrum_m);
            rec.spectrum[si] = metrics(gramian_for(members)).spectrum;
        }
    }
    return rec;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw ValidationError("write to '" + path.string() + "' failed");
}

std::string format_value(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    generator.validate();
    gramian.validate();
    if (realizations < 1) throw ValidationError("realizations must be at least 1");
    if (threads < 0) throw ValidationError("thread count cannot be negative");
    if (strategies.empty()) throw ValidationError("at least one strategy is required");
    for (Strategy s : strategies) {
        if (s == Strategy::target_flow) {
            throw ValidationError("target_flow is not a sweep strategy");
        }
    }
    std::set<Strategy> unique_strategies(strategies.begin(), strategies.end());
    if (unique_strategies.size() != strategies.size()) {
        throw ValidationError("strategies list contains a duplicate");
    }
    if (outputs.metric_sweep || !m_grid.empty()) {
        if (m_grid.empty()) throw ValidationError("metric sweep requires a non-empty m_grid");
        for (std::size_t i = 0; i < m_grid.size(); ++i) {
            if (m_grid[i] < 1 || m_grid[i] > generator.n) {
                throw ValidationError("m_grid entries must lie in 1..n");
            }
            if (i > 0 && m_grid[i] <= m_grid[i - 1]) {
                throw ValidationError("m_grid must be strictly increasing");
            }
        }
    }
    if (outputs.spectrum_at_m && (spectrum_m < 1 || spectrum_m > generator.n)) {
        throw ValidationError("spectrum_m must lie in 1..n");
    }
    if (!outputs.metric_sweep && !outputs.spectrum_at_m && !outputs.centrality_profile) {
        throw ValidationError("no outputs requested");
    }
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("config root must be a JSON object");
    check_keys(root,
               {"version", "generator", "realizations", "base_seed", "m_grid", "strategies",
                "horizon", "lyap_tol", "lyap_max_iter", "outputs", "spectrum_m", "threads"},
               "config");

    ExperimentConfig config;
    if (!root.contains("generator") || !root.at("generator").is_object()) {
        throw ValidationError("config needs a 'generator' object");
    }
    config.generator = generator_from_json(root.at("generator"));
    config.realizations = require<int>(root, "realizations", "config");
    config.base_seed = require<std::uint64_t>(root, "base_seed", "config");
    config.m_grid = optional_or<std::vector<int>>(root, "m_grid", "config", {});

    const auto strategy_names = require<std::vector<std::string>>(root, "strategies", "config");
    for (const std::string& name : strategy_names) {
        const auto strategy = strategy_from_name(name);
        if (!strategy.has_value()) throw ValidationError("unknown strategy '" + name + "'");
        config.strategies.push_back(*strategy);
    }

    if (root.contains("horizon")) {
        const auto& h = root.at("horizon");
        if (h.is_string()) {
            const auto text_h = h.get<std::string>();
            if (text_h != "inf") {
                throw ValidationError("horizon must be \"inf\" or a positive integer");
            }
        } else if (h.is_number_integer()) {
            config.gramian.horizon = h.get<int>();
        } else {
            throw ValidationError("horizon must be \"inf\" or a positive integer");
        }
    }
    config.gramian.lyap_tol = optional_or(root, "lyap_tol", "config", config.gramian.lyap_tol);
    config.gramian.lyap_max_iter =
        optional_or(root, "lyap_max_iter", "config", config.gramian.lyap_max_iter);

    const auto output_names = require<std::vector<std::string>>(root, "outputs", "config");
    for (const std::string& name : output_names) {
        bool* flag = nullptr;
        if (name == "metric_sweep") flag = &config.outputs.metric_sweep;
        else if (name == "spectrum_at_m") flag = &config.outputs.spectrum_at_m;
        else if (name == "centrality_profile") flag = &config.outputs.centrality_profile;
        else throw ValidationError("unknown output '" + name + "'");
        if (*flag) throw ValidationError("output '" + name + "' listed twice");
        *flag = true;
    }

    if (root.contains("spectrum_m") && !config.outputs.spectrum_at_m) {
        throw ValidationError("spectrum_m given but spectrum_at_m output not requested");
    }
    if (config.outputs.spectrum_at_m) {
        config.spectrum_m = require<int>(root, "spectrum_m", "config");
    }
    config.threads = optional_or(root, "threads", "config", 0);

    config.validate();
    return config;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string ExperimentConfig::to_json_text() const {
    ordered_json root;
    root["version"] = artifact_version;
    root["generator"] = generator_to_json(generator);
    root["realizations"] = realizations;
    root["base_seed"] = base_seed;
    root["m_grid"] = m_grid;
    ordered_json strategy_names = ordered_json::array();
    for (Strategy s : strategies) strategy_names.push_back(strategy_name(s));
    root["strategies"] = strategy_names;
    if (gramian.is_infinite()) {
        root["horizon"] = "inf";
    } else {
        root["horizon"] = *gramian.horizon;
    }
    root["lyap_tol"] = gramian.lyap_tol;
    root["lyap_max_iter"] = gramian.lyap_max_iter;
    ordered_json output_names = ordered_json::array();
    if (outputs.metric_sweep) output_names.push_back("metric_sweep");
    if (outputs.spectrum_at_m) output_names.push_back("spectrum_at_m");
    if (outputs.centrality_profile) output_names.push_back("centrality_profile");
    root["outputs"] = output_names;
    if (outputs.spectrum_at_m) root["spectrum_m"] = spectrum_m;
    root["threads"] = threads;
    return root.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const int total = config.realizations;
    std::vector<Record> records(static_cast<std::size_t>(total));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(total));

    unsigned worker_count = config.threads > 0
                                ? static_cast<unsigned>(config.threads)
                                : std::max(1u, std::thread::hardware_concurrency());
    worker_count = std::min<unsigned>(worker_count, static_cast<unsigned>(total));

    std::atomic<int> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const int r = cursor.fetch_add(1);
            if (r >= total) return;
            try {
                records[static_cast<std::size_t>(r)] = run_one(config, r + 1);
            } catch (...) {
                failures[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
    };
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (unsigned i = 0; i < worker_count; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Deterministic failure reporting: the lowest failing realization wins.
    for (int r = 0; r < total; ++r) {
        if (!failures[static_cast<std::size_t>(r)]) continue;
        const std::string prefix = "realization " + std::to_string(r + 1) + ": ";
        try {
            std::rethrow_exception(failures[static_cast<std::size_t>(r)]);
        } catch (const ValidationError& e) {
            throw ValidationError(prefix + e.what());
        } catch (const std::exception& e) {
            throw NumericError(prefix + e.what());
        }
    }

    const std::size_t n_strategies = config.strategies.size();
    const std::size_t n_cells = config.m_grid.size();
    const int n = config.generator.n;

    ExperimentResult result;
    result.config = config;
    result.sweep.assign(n_strategies, std::vector<SweepCell>(n_cells));
    result.mean_qtilde_bound.assign(n_cells, 0.0);

    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t si = 0; si < n_strategies; ++si) {
        for (std::size_t mi = 0; mi < n_cells; ++mi) {
            double trace_sum = 0.0, lmin_sum = 0.0;
            for (const Record& rec : records) {
                trace_sum += rec.trace[si][mi];
                lmin_sum += rec.lmin[si][mi];
            }
            result.sweep[si][mi] = {trace_sum * scale, lmin_sum * scale};
        }
    }
    for (std::size_t mi = 0; mi < n_cells; ++mi) {
        double bound_sum = 0.0;
        for (const Record& rec : records) bound_sum += rec.bound[mi];
        result.mean_qtilde_bound[mi] = bound_sum * scale;
    }
    if (config.outputs.spectrum_at_m) {
        result.mean_spectrum.assign(n_strategies, Eigen::VectorXd::Zero(n));
        for (std::size_t si = 0; si < n_strategies; ++si) {
            for (const Record& rec : records) result.mean_spectrum[si] += rec.spectrum[si];
            result.mean_spectrum[si] *= scale;
        }
    }
    if (config.outputs.centrality_profile) {
        result.mean_sorted_p = Eigen::VectorXd::Zero(n);
        result.mean_sorted_q = Eigen::VectorXd::Zero(n);
        result.mean_sorted_qtilde = Eigen::VectorXd::Zero(n);
        for (const Record& rec : records) {
            result.mean_sorted_p += rec.sorted_p;
            result.mean_sorted_q += rec.sorted_q;
            result.mean_sorted_qtilde += rec.sorted_qtilde;
        }
        result.mean_sorted_p *= scale;
        result.mean_sorted_q *= scale;
        result.mean_sorted_qtilde *= scale;
    }
    return result;
}

std::vector<std::filesystem::path> emit_csv(const ExperimentResult& result,
                                            const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw ValidationError("cannot create output directory '" + out_dir.string() +
                              "': " + ec.message());
    }
    const ExperimentConfig& config = result.config;
    std::vector<std::filesystem::path> written;

    if (config.outputs.metric_sweep) {
        std::string csv = "strategy,m,mean_trace,mean_lambda_min,qtilde_bound\n";
        for (std::size_t si = 0; si < config.strategies.size(); ++si) {
            for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi) {
                const SweepCell& cell = result.sweep[si][mi];
                csv += strategy_name(config.strategies[si]);
                csv += "," + std::to_string(config.m_grid[mi]);
                csv += "," + format_value(cell.mean_trace);
                csv += "," + format_value(cell.mean_lambda_min);
                csv += "," + format_value(result.mean_qtilde_bound[mi]);
                csv += "\n";
            }
        }
        const auto path = out_dir / "metrics.csv";
        write_text_file(path, csv);
        written.push_back(path);
    }
    if (config.outputs.spectrum_at_m) {
        std::string csv = "strategy,rank,mean_eigenvalue\n";
        for (std::size_t si = 0; si < config.strategies.size(); ++si) {
            const Eigen::VectorXd& spectrum = result.mean_spectrum[si];
            for (Eigen::Index rank = 0; rank < spectrum.size(); ++rank) {
                csv += strategy_name(config.strategies[si]);
                csv += "," + std::to_string(rank + 1);
                csv += "," + format_value(spectrum(rank));
                csv += "\n";
            }
        }
        const auto path = out_dir / ("spectrum_m" + std::to_string(config.spectrum_m) + ".csv");
        write_text_file(path, csv);
        written.push_back(path);
    }
    if (config.outputs.centrality_profile) {
        std::string csv = "order_stat,mean_p,mean_q,mean_qtilde\n";
        for (Eigen::Index i = 0; i < result.mean_sorted_p.size(); ++i) {
            csv += std::to_string(i + 1);
            csv += "," + format_value(result.mean_sorted_p(i));
            csv += "," + format_value(result.mean_sorted_q(i));
            csv += "," + format_value(result.mean_sorted_qtilde(i));
            csv += "\n";
        }
        const auto path = out_dir / "centrality_profile.csv";
        write_text_file(path, csv);
        written.push_back(path);
    }

    const auto config_path = out_dir / "config.json";
    write_text_file(config_path, config.to_json_text());
    written.push_back(config_path);
    return written;
}

}  // namespace gramcent
