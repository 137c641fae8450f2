#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "aid/clustering.hpp"
#include "aid/dataset.hpp"
#include "aid/partition.hpp"
#include "aid/s3vm_bnb.hpp"

namespace aid::s3vm {

enum class BalanceMode { none, constraint, cost };

std::string_view to_string(BalanceMode mode);
/// "none", "constraint" or "cost"; throws std::invalid_argument otherwise.
BalanceMode parse_balance(std::string_view text);

struct S3vmOptions {
    double labeled_penalty = 5.0;    ///< Ml
    double unlabeled_penalty = 1.0;  ///< Mu
    BalanceMode balance = BalanceMode::none;
    /// Balance cost normally multiplies Ml by max(1, |I-|/|I+|) on label -1
    /// entries and by max(1, |I+|/|I-|) on label +1 entries. When swapped the
    /// two multipliers trade places, so the minority class gets the boost.
    bool balance_cost_swapped = false;
    S3vmBnbOptions bnb;
};

/// Hyperplane plus the labels of the unlabeled entries, listed in the order
/// of Dataset::unlabeled_indices().
struct S3vmModel {
    Vector w;
    double b = 0.0;
    std::vector<int> d;

    friend bool operator==(const S3vmModel& a, const S3vmModel& c) {
        return same_values(a.w, c.w) && a.b == c.b && a.d == c.d;
    }
};

/// Per-entry labeled slack cost Ml * multiplier (0 for unlabeled entries).
Vector labeled_costs(const Dataset& data, const S3vmOptions& options);

/// Aggregated instance: labeled centroids with cost sum over the cluster,
/// unlabeled centroids with Mu |D_k|, and the balance target when requested.
/// Throws std::invalid_argument on a mixed-label labeled cluster.
S3vmBnbInstance aggregate(const S3vmPartitions& partitions, const Dataset& data, const S3vmOptions& options);

/// d_i = +1 iff w x_i + b >= 0, for the given unlabeled rows.
std::vector<int> assign_labels(const Vector& w, double b, const Dataset& data,
                               const std::vector<std::size_t>& unlabeled);

enum class MarginSet : unsigned char {
    labeled_positive,   ///< 1 - y f > 0
    labeled_nonpositive,
    plus_plus,          ///< 1 - d f > 0, f > 0
    plus_minus,         ///< 1 - d f > 0, f <= 0
    minus_plus,         ///< 1 - d f <= 0, f > 0
    minus_minus,        ///< 1 - d f <= 0, f <= 0
};

/// Values within 1e-9 of zero count as nonpositive.
bool positive_value(double value);

/// Set membership for every entry given decision values f. Unlabeled
/// entries use d_i = sign(f_i) (with sign(0) = +1).
std::vector<MarginSet> classify_margins(const Vector& decision, const Dataset& data);

/// Same with explicit labels for the unlabeled entries (order of
/// Dataset::unlabeled_indices()).
std::vector<MarginSet> classify_margins(const Vector& decision, const Dataset& data, const std::vector<int>& d);

/// Labeled clusters: kept when every hinge argument is <= 1e-9 or every one
/// is >= -1e-9, otherwise split at 1e-9. Unlabeled clusters: kept when all
/// members share a margin set, otherwise split into the non-empty sets.
bool check_optimality(const S3vmPartitions& partitions, const std::vector<MarginSet>& sets, const Vector& decision,
                      const Dataset& data);
bool decluster(S3vmPartitions& partitions, const std::vector<MarginSet>& sets, const Vector& decision,
               const Dataset& data);

/// 1/2 |w|^2 + sum_l cost_i xi_i + Mu sum_u xi_u with the error-minimizing labels sign(w x_u + b).
double evaluate(const Vector& w, double b, const Dataset& data, const Vector& labeled_cost, double unlabeled_penalty);

/// Adapter for run_aid. F_t is not monotone for this problem, so the gap
/// never stops the loop.
class S3vmProblem {
public:
    /// Throws DataError when a labeled class is missing (unless the balance
    /// constraint fixes the bias) or labels are invalid.
    S3vmProblem(const Dataset& data, S3vmOptions options = {});

    std::size_t entry_count() const { return data_.n(); }
    std::size_t minimum_clusters() const { return aid::minimum_clusters(data_.n(), data_.m(), ProblemKind::s3vm); }
    InitialRate default_initial_rate() const { return initial_rate(data_.n(), data_.m(), ProblemKind::s3vm); }
    double default_gap_tolerance() const { return 0.0; }
    bool bounds_are_monotone() const { return false; }

    void initialize(std::size_t k0, std::uint64_t seed);
    void initialize(S3vmPartitions partitions);

    std::size_t cluster_count() const { return partitions_.size(); }
    bool all_singletons() const { return partitions_.all_singletons(); }
    double solve();
    bool subproblem_exact() const { return result_.optimal; }
    double evaluate();
    bool optimality_condition() const;
    bool decluster();

    const S3vmPartitions& partitions() const { return partitions_; }
    const S3vmBnbResult& aggregated_result() const { return result_; }
    const S3vmModel& model() const { return model_; }
    const Vector& decision() const { return decision_; }
    const std::vector<MarginSet>& margin_sets() const { return sets_; }
    const S3vmOptions& options() const { return options_; }
    const Dataset& data() const { return data_; }

private:
    const Dataset& data_;
    S3vmOptions options_;
    std::vector<std::size_t> unlabeled_;
    Vector labeled_cost_;
    S3vmPartitions partitions_;
    S3vmBnbResult result_;
    S3vmModel model_;
    Vector decision_;
    std::vector<MarginSet> sets_;
};

}  // namespace aid::s3vm
