#pragma once

#include <cstddef>
#include <cstdint>

#include "aid/clustering.hpp"
#include "aid/dataset.hpp"
#include "aid/kernel.hpp"
#include "aid/partition.hpp"
#include "aid/svm_qp.hpp"

namespace aid::svm {

/// Classifier on original entries. Linear models keep w; kernel models keep
/// the support rows with coefficients alpha_i y_i, so that
/// f(x) = sum_j coef_j K(support_j, x) + b.
struct SvmModel {
    Kernel kernel;
    Vector w;
    double b = 0.0;
    RowMatrix support;
    Vector coef;

    friend bool operator==(const SvmModel& a, const SvmModel& c) {
        return a.kernel == c.kernel && same_values(a.w, c.w) && a.b == c.b && same_values(a.support, c.support) &&
               same_values(a.coef, c.coef);
    }
};

/// f(x_i) for every row of `x`.
Vector decision_values(const SvmModel& model, const RowMatrix& x);

/// Centroids (empty on the Gram path) or aggregated Gram, with cluster labels
/// and cardinality weights.
struct SvmAggregate {
    RowMatrix x;
    Matrix gram;
    Vector y;
    Vector weights;
};

/// Throws std::invalid_argument when a cluster mixes labels.
SvmAggregate aggregate_linear(const ClusterPartition& partition, const Dataset& data);

/// (k, q) entry = mean of the |C_k| x |C_q| block of `gram`; symmetrized.
Matrix aggregate_kernel(const ClusterPartition& partition, const Matrix& gram);

/// S(i, k) = mean over j in C_k of gram(i, j). The aggregated Gram is the
/// row-wise cluster mean of S, and decision values are S (alpha y) + b.
Matrix cluster_column_means(const ClusterPartition& partition, const Matrix& gram);

/// Cluster labels; throws std::invalid_argument on a mixed cluster.
Vector cluster_labels(const ClusterPartition& partition, const Vector& y);

/// max(0, 1 - y_i f_i).
Vector slacks(const Vector& decision, const Vector& y);

/// 1/2 |w|^2 + M sum xi.
double primal_objective(double norm_squared, const Vector& xi, double penalty);

/// Cluster means of per-entry slacks.
Vector convert_to_aggregated(const Vector& xi, const ClusterPartition& partition);

/// alpha_hat_i = alpha_k / |C_k|. Throws std::invalid_argument when some
/// alpha_k exceeds |C_k| M or is negative.
Vector disaggregate_dual(const Vector& alpha, const ClusterPartition& partition, double penalty);

/// Hinge arguments above 1e-9 count as positive.
bool positive_hinge(double hinge);

bool check_optimality(const ClusterPartition& partition, const Vector& decision, const Vector& y);
bool decluster(ClusterPartition& partition, const Vector& decision, const Vector& y);

/// Full-data weighted SVM with unit weights.
SvmSolution solve_direct(const Dataset& data, double penalty, const Kernel& kernel = Kernel::linear(),
                         const SvmSolverOptions& options = {});

struct SvmOptions {
    double penalty = 0.1;
    Kernel kernel = Kernel::linear();
    /// Aggregate through block means of the full Gram matrix even for the
    /// linear kernel. Non-linear kernels always use this path.
    bool gram_path = false;
    SvmSolverOptions solver;
};

/// Largest n for which the full Gram matrix is stored.
inline constexpr std::size_t max_gram_entries = 20000;

/// Adapter for run_aid.
class SvmProblem {
public:
    /// Throws ConfigError for a kernel instance above max_gram_entries and
    /// DataError for invalid labels.
    SvmProblem(const Dataset& data, SvmOptions options = {});

    std::size_t entry_count() const { return data_.n(); }
    std::size_t minimum_clusters() const { return 2; }
    InitialRate default_initial_rate() const { return initial_rate(data_.n(), data_.m(), ProblemKind::svm); }
    double default_gap_tolerance() const { return 1e-4; }
    bool bounds_are_monotone() const { return true; }

    void initialize(std::size_t k0, std::uint64_t seed);
    void initialize(ClusterPartition partition);

    std::size_t cluster_count() const { return partition_.size(); }
    bool all_singletons() const { return partition_.all_singletons(); }
    double solve();
    bool subproblem_exact() const { return true; }
    double evaluate();
    bool optimality_condition() const;
    bool decluster();

    bool uses_gram() const { return gram_path_; }
    const ClusterPartition& partition() const { return partition_; }
    const SvmAggregate& current_aggregate() const { return aggregate_; }
    const SvmSolution& aggregated_solution() const { return solution_; }
    const SvmModel& model() const { return model_; }
    const Vector& decision() const { return decision_; }
    const Vector& current_slacks() const { return xi_; }
    /// alpha_hat for the current aggregated solution.
    Vector disaggregated_dual() const;
    const SvmOptions& options() const { return options_; }
    const Dataset& data() const { return data_; }

private:
    void build_model();

    const Dataset& data_;
    SvmOptions options_;
    bool gram_path_ = false;
    Matrix gram_;
    Matrix column_means_;
    ClusterPartition partition_;
    SvmAggregate aggregate_;
    SvmSolution solution_;
    SvmModel model_;
    Vector decision_;
    Vector xi_;
};

}  // namespace aid::svm
