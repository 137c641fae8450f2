#include "aid/framework.hpp"

#include <cmath>
#include <limits>

namespace aid {

std::string_view to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::optimality_condition:
            return "optimality-condition";
        case TerminationReason::gap_tolerance:
            return "gap-tolerance";
        case TerminationReason::max_iterations:
            return "max-iterations";
        case TerminationReason::time_limit:
            return "time-limit";
        case TerminationReason::singleton_clusters:
            return "singleton-clusters";
    }
    return "unknown";
}

void AidConfig::validate() const {
    if (initial_rate && !(*initial_rate > 0.0 && *initial_rate <= 1.0)) {
        throw ConfigError("initial rate must be in (0, 1]");
    }
    if (gap_tolerance && !(*gap_tolerance >= 0.0)) throw ConfigError("gap tolerance must be non-negative");
    if (max_iterations < 1) throw ConfigError("max iterations must be at least 1");
    if (time_limit && !(*time_limit > 0.0)) throw ConfigError("time limit must be positive");
    if (fixed_iterations && *fixed_iterations < 1) throw ConfigError("fixed iteration count must be at least 1");
}

double compute_gap(double best, double lower) {
    if (best > 0.0) return std::max(0.0, (best - lower) / best);
    if (lower <= 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
}

std::optional<TerminationReason> check_termination(const IterationRecord& record, const AidConfig& config,
                                                   double gap_tolerance, bool gap_applies, bool all_singletons) {
    if (record.optimal) return TerminationReason::optimality_condition;
    if (gap_applies && record.gap <= gap_tolerance) return TerminationReason::gap_tolerance;
    const std::size_t cap = config.fixed_iterations.value_or(config.max_iterations);
    if (record.t >= cap) return TerminationReason::max_iterations;
    if (config.time_limit && record.elapsed_seconds >= *config.time_limit) return TerminationReason::time_limit;
    if (all_singletons) return TerminationReason::singleton_clusters;
    return std::nullopt;
}

}  // namespace aid
