#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gramcent/centrality.hpp"
#include "gramcent/netgraph.hpp"

namespace gramcent {

/// Version tag echoed into experiment outputs.
extern const char* const artifact_version;

/// Which artifact files an experiment run produces.
struct ExperimentOutputs {
    bool metric_sweep = false;
    bool spectrum_at_m = false;
    bool centrality_profile = false;
};

/// Full description of a random-network experiment: an ensemble of
/// generator realizations, a grid of driver-set sizes, and the placement
/// strategies to sweep. Realization r (1-based) uses seed base_seed XOR r.
struct ExperimentConfig {
    GeneratorParams generator;
    int realizations = 1;
    std::vector<int> m_grid;
    std::vector<Strategy> strategies;
    GramianSpec gramian;
    std::uint64_t base_seed = 0;
    ExperimentOutputs outputs;
    int spectrum_m = 0;  // driver count for the spectrum output
    int threads = 0;     // 0 = hardware concurrency

    void validate() const;

    /// Strict JSON parsing: unknown keys are rejected, `version` is accepted
    /// and ignored so emitted configs round-trip.
    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    static ExperimentConfig from_json_text(const std::string& text);

    /// The effective config with defaults filled in, as the emitted echo.
    std::string to_json_text() const;
};

/// Ensemble means for one (strategy, m) cell.
struct SweepCell {
    double mean_trace = 0.0;
    double mean_lambda_min = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    /// Indexed [strategy][m-grid position], strategies in config order.
    std::vector<std::vector<SweepCell>> sweep;
    /// Mean spectral upper bound per m-grid position (NaN where m = n).
    std::vector<double> mean_qtilde_bound;
    /// Mean Gramian spectrum (ascending) per strategy at m = spectrum_m.
    std::vector<Eigen::VectorXd> mean_spectrum;
    /// Mean sorted-descending centrality profiles.
    Eigen::VectorXd mean_sorted_p;
    Eigen::VectorXd mean_sorted_q;
    Eigen::VectorXd mean_sorted_qtilde;
};

/// Runs every realization (deterministically seeded, aggregated in fixed
/// order regardless of thread count) and returns the ensemble means. A
/// failing realization aborts the run with its index in the message; the
/// spectral bound is also asserted against every computed Gramian.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes the requested artifact files plus the config echo into the
/// directory (created if needed). Returns the paths written. Reruns with the
/// same config produce byte-identical files.
std::vector<std::filesystem::path> emit_csv(const ExperimentResult& result,
                                            const std::filesystem::path& out_dir);

/// The command-line entry point (exposed for testing). Exit codes: 0 on
/// success, 1 for validation and I/O problems, 2 for numeric failures.
int cli_main(int argc, const char* const* argv);

}  // namespace gramcent
