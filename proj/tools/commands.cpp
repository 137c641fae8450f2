#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <utility>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "aid/aid.hpp"

namespace aid::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

TaskKind task_kind(const std::string& problem) {
    if (problem == "lad") return TaskKind::regression;
    if (problem == "svm") return TaskKind::classification;
    if (problem == "s3vm") return TaskKind::semi_supervised;
    throw UsageError("unknown problem '" + problem + "'; expected lad, svm or s3vm");
}

ProblemKind problem_kind(const std::string& problem) {
    if (problem == "lad") return ProblemKind::lad;
    if (problem == "svm") return ProblemKind::svm;
    if (problem == "s3vm") return ProblemKind::s3vm;
    throw UsageError("unknown problem '" + problem + "'; expected lad, svm or s3vm");
}

Dataset load_data(const RunOptions& o) {
    const TaskKind kind = task_kind(o.problem);
    Dataset data;
    if (!o.input.empty()) {
        if (o.n || o.m) throw UsageError("--input cannot be combined with --n/--m");
        if (has_suffix(o.input, ".csv")) {
            data = load_csv(o.input, CsvOptions{o.label_column, kind});
        } else {
            SvmlightOptions svm_options;
            svm_options.kind = kind;
            data = load_svmlight(o.input, svm_options);
        }
        spdlog::info("loaded {} entries with {} features from {}", data.n(), data.m(), o.input);
    } else {
        if (!o.n || !o.m) throw UsageError("give --input or both --n and --m for a synthetic instance");
        SyntheticSpec spec;
        spec.kind = problem_kind(o.problem);
        spec.n = *o.n;
        spec.m = *o.m;
        spec.seed = o.seed;
        spec.noise = o.noise;
        spec.separation = o.separation;
        spec.labeled_fraction = o.labeled_fraction;
        data = generate(spec);
        spdlog::info("generated {} instance n={} m={} seed={}", o.problem, spec.n, spec.m, spec.seed);
    }
    if (o.intercept) {
        if (o.problem != "lad") throw UsageError("--intercept applies to lad only; SVM models carry their own bias");
        data = with_intercept(data);
    }
    data.validate(kind);
    if (data.n() == 0) throw DataError("dataset has no entries");
    return data;
}

AidConfig make_config(const RunOptions& o) {
    AidConfig config;
    config.initial_rate = o.r0;
    config.gap_tolerance = o.tol;
    config.max_iterations = o.max_iter;
    config.time_limit = o.time_limit;
    config.rng_seed = o.seed;
    config.fixed_iterations = o.iterations;
    return config;
}

template <class T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json config_json(const RunOptions& o, const Dataset& data) {
    json c;
    c["problem"] = o.problem;
    if (o.input.empty()) {
        c["source"] = {{"generator", o.problem}, {"n", data.n()}, {"noise", o.noise},
                       {"separation", o.separation}, {"labeled_fraction", o.labeled_fraction}};
    } else {
        c["source"] = {{"input", o.input}, {"label_column", o.label_column}};
    }
    c["n"] = data.n();
    c["m"] = data.m();
    c["intercept"] = o.intercept;
    c["seed"] = o.seed;
    c["r0"] = optional_json(o.r0);
    c["tol"] = optional_json(o.tol);
    c["max_iter"] = o.max_iter;
    c["time_limit"] = optional_json(o.time_limit);
    c["iterations"] = optional_json(o.iterations);
    if (o.problem == "svm") {
        c["M"] = o.penalty;
        c["kernel"] = o.kernel;
        c["gram_path"] = o.gram_path;
    } else if (o.problem == "s3vm") {
        c["Ml"] = o.labeled_penalty;
        c["Mu"] = o.unlabeled_penalty;
        c["balance"] = o.balance;
        c["balance_cost_swapped"] = o.balance_cost_swapped;
    }
    return c;
}

class LogWriter {
public:
    LogWriter(const std::string& path, bool default_stdout) {
        if (!path.empty()) {
            file_.open(path, std::ios::trunc);
            if (!file_) throw DataError("cannot write log file '" + path + "'");
            out_ = &file_;
        } else if (default_stdout) {
            out_ = &std::cout;
        }
    }

    void write(const json& record) {
        if (out_ == nullptr) return;
        *out_ << record.dump() << '\n';
        out_->flush();
    }

    void iteration(const IterationRecord& r) {
        write({{"event", "iteration"},
               {"t", r.t},
               {"num_clusters", r.num_clusters},
               {"rate", r.rate},
               {"F", r.lower},
               {"E", r.upper},
               {"E_best", r.best},
               {"gap", std::isfinite(r.gap) ? json(r.gap) : json("inf")},
               {"optimal", r.optimal},
               {"exact", r.subproblem_exact},
               {"partition_seconds", r.partition_seconds},
               {"solve_seconds", r.solve_seconds},
               {"evaluate_seconds", r.evaluate_seconds},
               {"elapsed_seconds", r.elapsed_seconds}});
    }

private:
    std::ofstream file_;
    std::ostream* out_ = nullptr;
};

struct Outcome {
    RunLog log;
    double seconds = 0.0;
    AnyModel model;
    Vector decision;  ///< on classification problems
    std::map<std::string, std::string> parameters;
};

struct Direct {
    double objective = 0.0;
    double seconds = 0.0;
    Vector decision;
    bool exact = true;
};

template <class Problem, class Extra>
RunLog run_logged(Problem& problem, const AidConfig& config, LogWriter& log, Extra&& extra) {
    return run_aid(problem, config, [&](const IterationRecord& record, const Problem& p) {
        log.iteration(record);
        extra(record, p);
    });
}

svm::SvmOptions svm_options(const RunOptions& o) {
    svm::SvmOptions s;
    s.penalty = o.penalty;
    s.kernel = Kernel::parse(o.kernel);
    s.gram_path = o.gram_path;
    return s;
}

s3vm::S3vmOptions s3vm_options(const RunOptions& o) {
    s3vm::S3vmOptions s;
    s.labeled_penalty = o.labeled_penalty;
    s.unlabeled_penalty = o.unlabeled_penalty;
    s.balance = s3vm::parse_balance(o.balance);
    s.balance_cost_swapped = o.balance_cost_swapped;
    if (o.time_limit) s.bnb.time_limit = *o.time_limit;
    return s;
}

template <class Extra>
Outcome run_problem(const RunOptions& o, const Dataset& data, const AidConfig& config, LogWriter& log, Extra&& extra) {
    Outcome out;
    const auto start = Clock::now();
    if (o.problem == "lad") {
        lad::LadProblem problem(data);
        out.log = run_logged(problem, config, log, extra);
        out.model = problem.model();
    } else if (o.problem == "svm") {
        svm::SvmProblem problem(data, svm_options(o));
        out.log = run_logged(problem, config, log, extra);
        out.model = problem.model();
        out.decision = problem.decision();
        out.parameters = {{"M", format_double(o.penalty)}, {"kernel", problem.options().kernel.to_string()}};
    } else {
        s3vm::S3vmProblem problem(data, s3vm_options(o));
        out.log = run_logged(problem, config, log, extra);
        out.model = problem.model();
        out.decision = problem.decision();
        out.parameters = {{"Ml", format_double(o.labeled_penalty)},
                          {"Mu", format_double(o.unlabeled_penalty)},
                          {"balance", o.balance},
                          {"balance_cost_swapped", o.balance_cost_swapped ? "true" : "false"}};
    }
    out.seconds = seconds_since(start);
    return out;
}

Direct solve_direct(const RunOptions& o, const Dataset& data) {
    Direct d;
    const auto start = Clock::now();
    if (o.problem == "lad") {
        d.objective = solve_weighted_lad(data.x, data.y, Vector::Ones(data.x.rows())).objective;
    } else if (o.problem == "svm") {
        const SvmSolution s = svm::solve_direct(data, o.penalty, Kernel::parse(o.kernel));
        d.objective = s.primal;
        d.decision = s.decision;
    } else {
        const auto options = s3vm_options(o);
        const S3vmPartitions singletons{ClusterPartition::singletons(data.n(), data.labeled_indices()),
                                        ClusterPartition::singletons(data.n(), data.unlabeled_indices())};
        const S3vmBnbResult r = solve_s3vm_bnb(s3vm::aggregate(singletons, data, options), options.bnb);
        d.objective = r.objective;
        d.decision = data.x * r.w;
        d.decision.array() += r.b;
        d.exact = r.optimal;
    }
    d.seconds = seconds_since(start);
    return d;
}

json metrics_json(const Metrics& m, const Direct& d, const Outcome& out) {
    json j = {{"rho", m.rho},
              {"delta", m.delta},
              {"gamma", optional_json(m.gamma)},
              {"r_T", m.final_rate},
              {"T", m.iterations},
              {"E_aid", out.log.final_record().upper},
              {"E_direct", d.objective},
              {"aid_seconds", out.seconds},
              {"direct_seconds", d.seconds}};
    if (!d.exact) j["direct_exact"] = false;
    return j;
}

Metrics compute_metrics(const Outcome& out, const Direct& d, const Dataset& data) {
    Metrics m;
    m.rho = d.seconds > 0.0 ? out.seconds / d.seconds : std::numeric_limits<double>::infinity();
    m.delta = relative_difference(out.log.final_record().upper, d.objective);
    if (out.decision.size() > 0) {
        m.gamma = classification_rate(out.decision, data.y) - classification_rate(d.decision, data.y);
    }
    m.final_rate = out.log.final_record().rate;
    m.iterations = out.log.iterations();
    return m;
}

json summary_json(const Outcome& out) {
    const IterationRecord& last = out.log.final_record();
    return {{"event", "summary"},
            {"termination", std::string(to_string(out.log.reason))},
            {"T", out.log.iterations()},
            {"initial_rate", out.log.initial_rate},
            {"initial_clusters", out.log.initial_clusters},
            {"r_T", last.rate},
            {"num_clusters", last.num_clusters},
            {"F", last.lower},
            {"E", last.upper},
            {"E_best", last.best},
            {"gap", std::isfinite(last.gap) ? json(last.gap) : json("inf")},
            {"init_seconds", out.log.init_seconds},
            {"total_seconds", out.seconds}};
}

struct Prepared {
    Dataset data;
    AidConfig config;
    json config_doc;
    std::string digest;
};

Prepared prepare(const RunOptions& o) {
    Prepared p;
    p.data = load_data(o);
    p.config = make_config(o);
    p.config.validate();
    p.config_doc = config_json(o, p.data);
    p.digest = fnv1a_hex(p.config_doc.dump());
    return p;
}

void write_header(LogWriter& log, const Prepared& p) {
    log.write({{"event", "header"}, {"config", p.config_doc}, {"config_digest", p.digest}, {"seed", p.config.rng_seed}});
}

void save_outcome_model(const RunOptions& o, const Prepared& p, const Outcome& out) {
    if (o.model_out.empty()) return;
    ModelFile file;
    file.model = out.model;
    file.parameters = out.parameters;
    file.parameters["problem"] = o.problem;
    file.seed = o.seed;
    file.config_digest = p.digest;
    save_model(o.model_out, file);
    spdlog::info("model written to {}", o.model_out);
}

constexpr auto no_extra = [](const IterationRecord&, const auto&) {};

}  // namespace

int cmd_run(const RunOptions& o) {
    const Prepared p = prepare(o);
    LogWriter log(o.log_path, true);
    write_header(log, p);
    const Outcome out = run_problem(o, p.data, p.config, log, no_extra);
    json summary = summary_json(out);
    if (o.oracle) {
        const Direct d = solve_direct(o, p.data);
        summary["metrics"] = metrics_json(compute_metrics(out, d, p.data), d, out);
    }
    log.write(summary);
    if (!o.log_path.empty()) std::cout << summary.dump() << '\n';
    spdlog::info("{} after {} iterations, E = {}", to_string(out.log.reason), out.log.iterations(),
                 out.log.final_record().upper);
    save_outcome_model(o, p, out);
    return exit_ok;
}

int cmd_compare(const RunOptions& o) {
    const Prepared p = prepare(o);
    LogWriter log(o.log_path, false);
    write_header(log, p);
    const Outcome out = run_problem(o, p.data, p.config, log, no_extra);
    log.write(summary_json(out));
    const Direct d = solve_direct(o, p.data);
    json metrics = metrics_json(compute_metrics(out, d, p.data), d, out);
    metrics["event"] = "metrics";
    log.write(metrics);
    std::cout << metrics.dump() << '\n';
    save_outcome_model(o, p, out);
    return exit_ok;
}

int cmd_diagnose_rates(const RunOptions& o, const std::string& out_path) {
    if (o.problem == "s3vm") throw UsageError("diagnose-rates supports lad and svm");
    const Prepared p = prepare(o);
    LogWriter log(o.log_path, false);
    write_header(log, p);

    std::ofstream file;
    std::ostream* csv = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::trunc);
        if (!file) throw DataError("cannot write '" + out_path + "'");
        csv = &file;
    }
    *csv << "t,num_clusters,rate,threshold,near_entries,far_entries,near_clusters,far_clusters,near_rate,far_rate\n";
    const auto emit = [&](const IterationRecord& r, const RateSplit& s) {
        *csv << r.t << ',' << r.num_clusters << ',' << format_double(r.rate) << ',' << format_double(s.threshold) << ','
             << s.near_entries << ',' << s.far_entries << ',' << s.near_clusters << ',' << s.far_clusters << ','
             << format_double(s.near_rate) << ',' << format_double(s.far_rate) << '\n';
    };
    const auto extra = [&](const IterationRecord& r, const auto& problem) {
        using P = std::decay_t<decltype(problem)>;
        if constexpr (std::is_same_v<P, lad::LadProblem>) {
            const auto& agg = problem.current_aggregate();
            const Vector cluster = agg.y - agg.x * problem.model().beta;
            emit(r, near_far_rates(problem.partition(), problem.current_residuals(), cluster));
        } else if constexpr (std::is_same_v<P, svm::SvmProblem>) {
            emit(r, near_far_rates(problem.partition(), problem.decision(), problem.aggregated_solution().decision));
        }
    };
    const Outcome out = run_problem(o, p.data, p.config, log, extra);
    log.write(summary_json(out));
    return exit_ok;
}

int cmd_generate(const GenerateOptions& o) {
    SyntheticSpec spec;
    spec.kind = problem_kind(o.problem);
    spec.n = o.n;
    spec.m = o.m;
    spec.seed = o.seed;
    spec.noise = o.noise;
    spec.separation = o.separation;
    spec.labeled_fraction = o.labeled_fraction;
    const Dataset data = generate(spec);
    const TaskKind kind = task_kind(o.problem);
    if (o.format == "csv") {
        if (o.out.empty()) {
            write_csv(std::cout, data, kind);
        } else {
            save_csv(o.out, data, kind);
        }
    } else if (o.format == "svmlight") {
        if (o.out.empty()) {
            write_svmlight(std::cout, data);
        } else {
            save_svmlight(o.out, data);
        }
    } else {
        throw UsageError("unknown format '" + o.format + "'; expected csv or svmlight");
    }
    return exit_ok;
}

}  // namespace aid::cli
