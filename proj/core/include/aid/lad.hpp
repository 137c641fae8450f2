#pragma once

#include <cstddef>
#include <cstdint>

#include "aid/clustering.hpp"
#include "aid/dataset.hpp"
#include "aid/lad_lp.hpp"
#include "aid/partition.hpp"

namespace aid::lad {

struct LadModel {
    Vector beta;

    friend bool operator==(const LadModel& a, const LadModel& b) { return same_values(a.beta, b.beta); }
};

/// Cluster means with cardinality weights.
struct LadAggregate {
    RowMatrix x;
    Vector y;
    Vector weights;
};

LadAggregate aggregate(const ClusterPartition& partition, const Dataset& data);

/// Weighted LAD on the aggregate; returns the model and F.
std::pair<LadModel, double> solve(const LadAggregate& aggregate, const LadSolverOptions& options = {});

/// y - X beta.
Vector residuals(const LadModel& model, const Dataset& data);

/// E = sum_i |y_i - x_i beta|.
double evaluate(const LadModel& model, const Dataset& data);

/// Residuals above 1e-9 (1 + |y_i|) are positive; everything else, zero
/// included, belongs to the nonpositive side.
bool positive_side(double residual, double response);

/// True iff every cluster's residuals fall on one side.
bool check_optimality(const ClusterPartition& partition, const Vector& residuals, const Dataset& data);
bool check_optimality(const ClusterPartition& partition, const LadModel& model, const Dataset& data);

/// Splits each mixed cluster into its positive and nonpositive members.
/// Returns true if any cluster was split.
bool decluster(ClusterPartition& partition, const Vector& residuals, const Dataset& data);
bool decluster(ClusterPartition& partition, const LadModel& model, const Dataset& data);

/// Adapter for run_aid.
class LadProblem {
public:
    explicit LadProblem(const Dataset& data, LadSolverOptions options = {});

    std::size_t entry_count() const { return data_.n(); }
    std::size_t minimum_clusters() const { return data_.m() + 1; }
    InitialRate default_initial_rate() const { return initial_rate(data_.n(), data_.m(), ProblemKind::lad); }
    double default_gap_tolerance() const { return 1e-3; }
    bool bounds_are_monotone() const { return true; }

    void initialize(std::size_t k0, std::uint64_t seed);
    /// Starts from an explicit partition instead of the initializer.
    void initialize(ClusterPartition partition);

    std::size_t cluster_count() const { return partition_.size(); }
    bool all_singletons() const { return partition_.all_singletons(); }
    double solve();
    bool subproblem_exact() const { return true; }
    double evaluate();
    bool optimality_condition() const;
    bool decluster();

    const ClusterPartition& partition() const { return partition_; }
    const LadModel& model() const { return model_; }
    const Vector& current_residuals() const { return residuals_; }
    const LadAggregate& current_aggregate() const { return aggregate_; }
    const Dataset& data() const { return data_; }

private:
    const Dataset& data_;
    LadSolverOptions options_;
    ClusterPartition partition_;
    LadAggregate aggregate_;
    LadModel model_;
    Vector residuals_;
};

}  // namespace aid::lad
