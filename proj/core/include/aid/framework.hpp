#pragma once

#include <chrono>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aid/clustering.hpp"
#include "aid/error.hpp"

namespace aid {

enum class TerminationReason {
    optimality_condition,
    gap_tolerance,
    max_iterations,
    time_limit,
    singleton_clusters,
};

std::string_view to_string(TerminationReason reason);

struct AidConfig {
    /// r0; when unset the problem's default rate is used.
    std::optional<double> initial_rate;
    /// When unset the problem default applies (1e-3 LAD, 1e-4 SVM).
    std::optional<double> gap_tolerance;
    std::size_t max_iterations = 100;
    /// Seconds of wall-clock time, measured from the start of initialization.
    std::optional<double> time_limit;
    std::uint64_t rng_seed = 0;
    /// Fixed-iterations mode: stop once t reaches this count.
    std::optional<std::size_t> fixed_iterations;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

struct IterationRecord {
    std::size_t t = 0;
    std::size_t num_clusters = 0;
    double rate = 0.0;   ///< num_clusters / n
    double lower = 0.0;  ///< F_t, aggregated objective
    double upper = 0.0;  ///< E_t, objective of the disaggregated solution
    double best = 0.0;   ///< E_best, min over s <= t of E_s
    double gap = 0.0;
    bool optimal = false;          ///< optimality condition holds
    bool subproblem_exact = true;  ///< aggregated solve reached its optimum
    /// Time spent building this iteration's clusters: initialization at
    /// t = 0, declustering of the previous iteration afterwards.
    double partition_seconds = 0.0;
    double solve_seconds = 0.0;
    double evaluate_seconds = 0.0;
    double elapsed_seconds = 0.0;
};

struct RunLog {
    AidConfig config;
    double initial_rate = 0.0;
    std::size_t initial_clusters = 0;
    double gap_tolerance = 0.0;
    std::size_t entries = 0;
    double init_seconds = 0.0;
    std::vector<IterationRecord> records;
    TerminationReason reason = TerminationReason::max_iterations;

    const IterationRecord& final_record() const { return records.back(); }
    std::size_t iterations() const { return records.empty() ? 0 : records.back().t; }
};

/// (E_best - F) / E_best clamped at 0; 0 when both are 0, +inf when only E_best is 0.
double compute_gap(double best, double lower);

/// First applicable reason in the order: optimality condition, gap tolerance
/// (only when `gap_applies`), iteration cap, time limit, all singletons.
std::optional<TerminationReason> check_termination(const IterationRecord& record, const AidConfig& config,
                                                   double gap_tolerance, bool gap_applies, bool all_singletons);

/// Operations a problem supplies to the generic loop. The adapter owns the
/// dataset view, the current partition and the latest models.
template <class A>
concept ProblemAdapter = requires(A a, const A ca, std::size_t k, std::uint64_t seed) {
    { ca.entry_count() } -> std::convertible_to<std::size_t>;
    { ca.minimum_clusters() } -> std::convertible_to<std::size_t>;
    { ca.default_initial_rate() } -> std::convertible_to<InitialRate>;
    { ca.default_gap_tolerance() } -> std::convertible_to<double>;
    { ca.bounds_are_monotone() } -> std::convertible_to<bool>;
    { a.initialize(k, seed) };
    { ca.cluster_count() } -> std::convertible_to<std::size_t>;
    { ca.all_singletons() } -> std::convertible_to<bool>;
    { a.solve() } -> std::convertible_to<double>;
    { ca.subproblem_exact() } -> std::convertible_to<bool>;
    { a.evaluate() } -> std::convertible_to<double>;
    { ca.optimality_condition() } -> std::convertible_to<bool>;
    { a.decluster() } -> std::convertible_to<bool>;
};

struct NoObserver {
    template <class A>
    void operator()(const IterationRecord&, const A&) const {}
};

/// Runs aggregate / solve / check / decluster until a termination reason
/// fires. The adapter holds the final (last iteration's) model afterwards.
/// `observer(record, adapter)` is called once per iteration with the complete
/// record, after the optimality check and before declustering, so the
/// adapter still holds that iteration's clusters and model.
template <ProblemAdapter A, class Observer = NoObserver>
RunLog run_aid(A& adapter, const AidConfig& config, Observer&& observer = {}) {
    using Clock = std::chrono::steady_clock;
    config.validate();
    const auto seconds_since = [](Clock::time_point from) {
        return std::chrono::duration<double>(Clock::now() - from).count();
    };

    RunLog log;
    log.config = config;
    log.entries = adapter.entry_count();
    log.gap_tolerance = config.gap_tolerance.value_or(adapter.default_gap_tolerance());
    if (log.entries == 0) throw ConfigError("dataset is empty");

    const auto start = Clock::now();
    if (config.initial_rate) {
        log.initial_rate = *config.initial_rate;
        log.initial_clusters = std::min(log.entries, clusters_for_rate(*config.initial_rate, log.entries));
        if (log.initial_clusters < adapter.minimum_clusters()) {
            throw ConfigError("initial rate " + std::to_string(*config.initial_rate) + " gives " +
                              std::to_string(log.initial_clusters) + " clusters; at least " +
                              std::to_string(adapter.minimum_clusters()) + " are required");
        }
    } else {
        const InitialRate rate = adapter.default_initial_rate();
        log.initial_rate = rate.rate;
        log.initial_clusters = rate.clusters;
    }
    adapter.initialize(log.initial_clusters, config.rng_seed);
    log.init_seconds = seconds_since(start);

    const bool monotone = adapter.bounds_are_monotone();
    double best = 0.0;
    double partition_seconds = log.init_seconds;
    for (std::size_t t = 0;; ++t) {
        IterationRecord record;
        record.t = t;
        record.partition_seconds = partition_seconds;
        record.num_clusters = adapter.cluster_count();
        record.rate = static_cast<double>(record.num_clusters) / static_cast<double>(log.entries);

        auto phase = Clock::now();
        record.lower = adapter.solve();
        record.subproblem_exact = adapter.subproblem_exact();
        record.solve_seconds = seconds_since(phase);

        phase = Clock::now();
        record.upper = adapter.evaluate();
        record.evaluate_seconds = seconds_since(phase);

        best = t == 0 ? record.upper : std::min(best, record.upper);
        record.best = best;
        record.gap = compute_gap(best, record.lower);
        record.optimal = adapter.optimality_condition();
        record.elapsed_seconds = seconds_since(start);
        log.records.push_back(record);
        observer(log.records.back(), std::as_const(adapter));

        const auto reason =
            check_termination(record, config, log.gap_tolerance, monotone, adapter.all_singletons());
        if (reason) {
            log.reason = *reason;
            return log;
        }

        phase = Clock::now();
        const bool split = adapter.decluster();
        partition_seconds = seconds_since(phase);
        if (!split) {
            throw SolverError("optimality condition fails but no cluster can be split");
        }
    }
}

}  // namespace aid
