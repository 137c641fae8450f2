#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "aid/error.hpp"
#include "commands.hpp"

namespace {

using namespace aid::cli;

void add_run_options(CLI::App& cmd, RunOptions& o) {
    cmd.add_option("--input", o.input, "CSV (.csv) or svmlight file; omit to generate an instance");
    cmd.add_option("--label-column", o.label_column, "CSV column holding the response or label (default: last)");
    cmd.add_option("--n", o.n, "entries of the generated instance");
    cmd.add_option("--m", o.m, "features of the generated instance");
    cmd.add_option("--noise", o.noise, "generator noise scale")->check(CLI::NonNegativeNumber);
    cmd.add_option("--separation", o.separation, "distance between generated class means")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--labeled-fraction", o.labeled_fraction, "share of generated entries keeping a label")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_flag("--intercept", o.intercept, "append an all-ones column (lad)");

    cmd.add_option("--seed", o.seed, "seed for generation and initial clustering");
    cmd.add_option("--r0", o.r0, "initial aggregation rate in (0, 1]");
    cmd.add_option("--tol", o.tol, "optimality gap tolerance (lad, svm)")->check(CLI::NonNegativeNumber);
    cmd.add_option("--max-iter", o.max_iter, "iteration cap")->check(CLI::PositiveNumber);
    cmd.add_option("--time-limit", o.time_limit, "wall-clock limit in seconds")->check(CLI::PositiveNumber);
    cmd.add_option("--iterations", o.iterations, "stop after exactly K iterations unless optimal earlier")
        ->check(CLI::PositiveNumber);

    cmd.add_option("--M", o.penalty, "SVM penalty")->check(CLI::PositiveNumber);
    cmd.add_option("--Ml", o.labeled_penalty, "S3VM labeled penalty")->check(CLI::PositiveNumber);
    cmd.add_option("--Mu", o.unlabeled_penalty, "S3VM unlabeled penalty")->check(CLI::PositiveNumber);
    cmd.add_option("--kernel", o.kernel, "linear or rbf:GAMMA");
    cmd.add_flag("--gram", o.gram_path, "aggregate through the Gram matrix even for the linear kernel");
    cmd.add_option("--balance", o.balance, "S3VM unbalanced-data technique")
        ->check(CLI::IsMember({"none", "constraint", "cost"}));
    cmd.add_flag("--balance-cost-swapped", o.balance_cost_swapped,
                 "give the larger balance-cost multiplier to the minority class");

    cmd.add_flag("--oracle", o.oracle, "also solve the full problem directly and report metrics");
    cmd.add_option("--log", o.log_path, "write the JSON-lines iteration log here");
    cmd.add_option("--model-out", o.model_out, "write the final model here");
}

void configure_logging() {
    auto logger = spdlog::stderr_logger_mt("aid");
    logger->set_pattern("aid: %l: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("AID_LOG_LEVEL")) {
        spdlog::set_level(spdlog::level::from_str(level));
    }
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Aggregate and iterative disaggregate solvers for LAD, SVM and semi-supervised SVM"};
    app.require_subcommand(1);

    RunOptions run;
    std::string diagnose_out;
    GenerateOptions gen;

    for (const char* problem : {"lad", "svm", "s3vm"}) {
        auto* cmd = app.add_subcommand(problem, std::string("run AID on a ") + problem + " instance");
        add_run_options(*cmd, run);
        cmd->callback([&run, problem] { run.problem = problem; });
    }
    auto* compare = app.add_subcommand("compare", "run AID and the direct solve; print rho, delta, gamma, r_T, T");
    compare->add_option("problem", run.problem, "lad, svm or s3vm")->required()->check(CLI::IsMember({"lad", "svm", "s3vm"}));
    add_run_options(*compare, run);

    auto* diagnose = app.add_subcommand("diagnose-rates", "per-iteration near/far aggregation rates as CSV");
    diagnose->add_option("problem", run.problem, "lad or svm")->required()->check(CLI::IsMember({"lad", "svm"}));
    diagnose->add_option("--out", diagnose_out, "CSV destination (default: stdout)");
    add_run_options(*diagnose, run);

    auto* generate = app.add_subcommand("generate", "write a synthetic instance");
    generate->add_option("problem", gen.problem, "lad, svm or s3vm")->required()->check(CLI::IsMember({"lad", "svm", "s3vm"}));
    generate->add_option("--n", gen.n, "entries")->check(CLI::PositiveNumber);
    generate->add_option("--m", gen.m, "features")->check(CLI::PositiveNumber);
    generate->add_option("--seed", gen.seed, "seed");
    generate->add_option("--noise", gen.noise, "noise scale")->check(CLI::NonNegativeNumber);
    generate->add_option("--separation", gen.separation, "distance between class means")->check(CLI::NonNegativeNumber);
    generate->add_option("--labeled-fraction", gen.labeled_fraction, "share of labeled entries")->check(CLI::Range(0.0, 1.0));
    generate->add_option("--out", gen.out, "destination (default: stdout)");
    generate->add_option("--format", gen.format, "csv or svmlight")->check(CLI::IsMember({"csv", "svmlight"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (app.got_subcommand(compare)) return cmd_compare(run);
        if (app.got_subcommand(diagnose)) return cmd_diagnose_rates(run, diagnose_out);
        if (app.got_subcommand(generate)) return cmd_generate(gen);
        return cmd_run(run);
    } catch (const aid::DataError& e) {
        std::cerr << "aid: data error: " << e.what() << '\n';
        return exit_data;
    } catch (const aid::SolverError& e) {
        std::cerr << "aid: solver error: " << e.what() << '\n';
        return exit_solver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "aid: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "aid: " << e.what() << '\n';
        return exit_solver;
    }
}
