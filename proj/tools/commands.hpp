#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace aid::cli {

/// Process exit statuses.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_data = 3,
    exit_solver = 4,
};

/// Flags shared by every problem subcommand.
struct RunOptions {
    std::string problem;  ///< lad, svm or s3vm

    // Data source: a file, or a synthetic instance when no file is given.
    std::string input;
    std::string label_column;
    std::optional<std::size_t> n;
    std::optional<std::size_t> m;
    double noise = 1.0;
    double separation = 2.0;
    double labeled_fraction = 0.1;
    bool intercept = false;

    // Loop.
    std::uint64_t seed = 0;
    std::optional<double> r0;
    std::optional<double> tol;
    std::size_t max_iter = 100;
    std::optional<double> time_limit;
    std::optional<std::size_t> iterations;

    // Models.
    double penalty = 0.1;
    double labeled_penalty = 5.0;
    double unlabeled_penalty = 1.0;
    std::string kernel = "linear";
    bool gram_path = false;
    std::string balance = "none";
    bool balance_cost_swapped = false;

    // Output.
    bool oracle = false;
    std::string log_path;
    std::string model_out;
};

struct GenerateOptions {
    std::string problem;
    std::size_t n = 1000;
    std::size_t m = 5;
    std::uint64_t seed = 0;
    double noise = 1.0;
    double separation = 2.0;
    double labeled_fraction = 0.1;
    std::string out;
    std::string format = "csv";
};

/// Runs AID and writes the iteration log, summary and model.
int cmd_run(const RunOptions& options);
/// Runs AID and the direct solve, printing rho, delta, gamma, r_T and T.
int cmd_compare(const RunOptions& options);
/// Per-iteration aggregation rates of entries near and far from the model, as CSV.
int cmd_diagnose_rates(const RunOptions& options, const std::string& out_path);
/// Writes a synthetic instance.
int cmd_generate(const GenerateOptions& options);

}  // namespace aid::cli
