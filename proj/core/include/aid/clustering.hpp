#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aid/dataset.hpp"
#include "aid/kernel.hpp"
#include "aid/partition.hpp"

namespace aid {

enum class ProblemKind { lad, svm, s3vm };

struct InitialRate {
    double rate = 0.0;       ///< r0
    std::size_t clusters = 0;  ///< k0 after the problem's minimum is applied
};

/// Default initial aggregation rate and cluster count for a problem size.
///   LAD:  r0 = max(3m/n, 0.0005) if m n > 5e8 else max(2m/n, 0.0005); k0 > m.
///   SVM:  r0 = max(1.1m/n, 0.0001); k0 >= 2.
///   S3VM: r0 = 0.01 if n <= 10000 else 0.0001; k0 >= 10.
/// Throws ConfigError for n == 0, m == 0, or n <= m with LAD.
InitialRate initial_rate(std::size_t n, std::size_t m, ProblemKind problem);

/// ceil(rate n), robust to rates like 0.1 whose product lands just above an integer.
std::size_t clusters_for_rate(double rate, std::size_t n);

/// Smallest k0 each problem accepts.
std::size_t minimum_clusters(std::size_t n, std::size_t m, ProblemKind problem);

/// Rows used to fit the initializer model: min(max(10 m, 200), n).
std::size_t initializer_sample_size(std::size_t n, std::size_t m);

/// One k-means assignment step in 1-D: seeds are the values at quantile
/// positions floor((j + 0.5) count / k) of the sorted (value, index) order,
/// each entry goes to its nearest seed (lower seed on ties). Returns the
/// seed index per entry; unused seeds simply receive nobody.
std::vector<std::size_t> quantile_assign_1d(std::span<const double> values, std::size_t k);

/// Same on 2-D points (a_i, b_i) with seeds taken from the lexicographic order.
std::vector<std::size_t> quantile_assign_2d(std::span<const double> a, std::span<const double> b, std::size_t k);

/// Nearest-seed assignment in feature space for the listed rows; ties go to
/// the lower seed index.
std::vector<std::size_t> assign_nearest(const RowMatrix& x, std::span<const std::size_t> rows, const RowMatrix& seeds);

/// Deterministic farthest-first seeds among `rows`: the first is the row
/// nearest the group mean, each next one the row farthest from the chosen set.
RowMatrix farthest_first_seeds(const RowMatrix& x, std::span<const std::size_t> rows, std::size_t k);

/// Splits `total` over groups proportionally to `sizes` (largest remainder),
/// giving each non-empty group at least 1 and at most its size.
std::vector<std::size_t> proportional_split(std::size_t total, std::span<const std::size_t> sizes);

/// LAD initializer: fit LAD on a sample, cluster (residual, response) pairs.
/// Falls back to response-only quantile binning when the sample is rank deficient.
ClusterPartition init_lad_clusters(const Dataset& data, std::size_t k0, std::uint64_t seed);

/// SVM initializer: fit an SVM on a sample (both labels guaranteed), cluster
/// each label's decision values separately in 1-D.
ClusterPartition init_svm_clusters(const Dataset& data, std::size_t k0, std::uint64_t seed,
                                   double penalty = 0.1, const Kernel& kernel = Kernel::linear());

struct S3vmPartitions {
    ClusterPartition labeled;
    ClusterPartition unlabeled;

    std::size_t size() const noexcept { return labeled.size() + unlabeled.size(); }
    bool all_singletons() const noexcept { return labeled.all_singletons() && unlabeled.all_singletons(); }
    friend bool operator==(const S3vmPartitions&, const S3vmPartitions&) = default;
};

/// S3VM initializer: one assignment step in feature space for labeled +1,
/// labeled -1 and unlabeled rows, with k0 split proportionally over the groups.
S3vmPartitions init_s3vm_clusters(const Dataset& data, std::size_t k0);

/// Same with explicit per-group cluster counts {labeled +1, labeled -1, unlabeled}.
S3vmPartitions init_s3vm_clusters(const Dataset& data, const std::array<std::size_t, 3>& counts);

}  // namespace aid
