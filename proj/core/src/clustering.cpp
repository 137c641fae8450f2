#include "aid/clustering.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "aid/error.hpp"
#include "aid/lad_lp.hpp"
#include "aid/rng.hpp"
#include "aid/svm_qp.hpp"

namespace aid {

namespace {

using Index = Eigen::Index;

constexpr std::uint64_t kSampleStream = 1;

std::vector<std::size_t> quantile_positions(std::size_t count, std::size_t k) {
    std::vector<std::size_t> out(k);
    for (std::size_t j = 0; j < k; ++j) {
        out[j] = std::min(count - 1, static_cast<std::size_t>(std::floor((static_cast<double>(j) + 0.5) *
                                                                          static_cast<double>(count) /
                                                                          static_cast<double>(k))));
    }
    return out;
}

// Appends one group per seed index used in `assignment`; empty ones are
// dropped later by the partition constructor.
void append_groups(std::span<const std::size_t> rows, std::span<const std::size_t> assignment,
                   std::vector<std::vector<std::size_t>>& groups) {
    const std::size_t offset = groups.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t g = offset + assignment[r];
        if (groups.size() <= g) groups.resize(g + 1);
        groups[g].push_back(rows[r]);
    }
}

}  // namespace

std::size_t clusters_for_rate(double rate, std::size_t n) {
    const double product = rate * static_cast<double>(n);
    const double guarded = product - 1e-9 * std::max(1.0, product);
    return static_cast<std::size_t>(std::max(0.0, std::ceil(guarded)));
}

std::size_t minimum_clusters(std::size_t n, std::size_t m, ProblemKind problem) {
    switch (problem) {
        case ProblemKind::lad:
            return m + 1;
        case ProblemKind::svm:
            return std::min<std::size_t>(2, n);
        case ProblemKind::s3vm:
            return std::min<std::size_t>(10, n);
    }
    return 1;
}

InitialRate initial_rate(std::size_t n, std::size_t m, ProblemKind problem) {
    if (n == 0 || m == 0) throw ConfigError("initial rate needs n >= 1 and m >= 1");
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    InitialRate out;
    switch (problem) {
        case ProblemKind::lad:
            if (n <= m) {
                throw ConfigError("LAD needs more rows than columns (n = " + std::to_string(n) +
                                  ", m = " + std::to_string(m) + ")");
            }
            out.rate = md * nd > 5e8 ? std::max(3.0 * md / nd, 0.0005) : std::max(2.0 * md / nd, 0.0005);
            break;
        case ProblemKind::svm:
            out.rate = std::max(1.1 * md / nd, 0.0001);
            break;
        case ProblemKind::s3vm:
            out.rate = n <= 10000 ? 0.01 : 0.0001;
            break;
    }
    out.rate = std::min(out.rate, 1.0);
    out.clusters = std::min(n, std::max(clusters_for_rate(out.rate, n), minimum_clusters(n, m, problem)));
    return out;
}

std::size_t initializer_sample_size(std::size_t n, std::size_t m) {
    return std::min(std::max<std::size_t>(10 * m, 200), n);
}

std::vector<std::size_t> quantile_assign_1d(std::span<const double> values, std::size_t k) {
    const std::size_t count = values.size();
    std::vector<std::size_t> out(count, 0);
    if (count == 0 || k == 0) return out;
    k = std::min(k, count);
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] != values[b] ? values[a] < values[b] : a < b;
    });
    std::vector<double> seeds(k);
    const auto positions = quantile_positions(count, k);
    for (std::size_t j = 0; j < k; ++j) seeds[j] = values[order[positions[j]]];

    for (std::size_t i = 0; i < count; ++i) {
        const double v = values[i];
        const auto right = static_cast<std::size_t>(std::lower_bound(seeds.begin(), seeds.end(), v) - seeds.begin());
        std::size_t best = std::min(right, k - 1);
        if (right > 0) {
            const double left_value = seeds[right - 1];
            const std::size_t left =
                static_cast<std::size_t>(std::lower_bound(seeds.begin(), seeds.end(), left_value) - seeds.begin());
            if (right == k || std::abs(v - left_value) <= std::abs(seeds[right] - v)) best = left;
        }
        out[i] = best;
    }
    return out;
}

std::vector<std::size_t> quantile_assign_2d(std::span<const double> a, std::span<const double> b, std::size_t k) {
    const std::size_t count = a.size();
    std::vector<std::size_t> out(count, 0);
    if (count == 0 || k == 0) return out;
    k = std::min(k, count);
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
        if (a[p] != a[q]) return a[p] < a[q];
        if (b[p] != b[q]) return b[p] < b[q];
        return p < q;
    });
    const auto positions = quantile_positions(count, k);
    std::vector<double> sa(k);
    std::vector<double> sb(k);
    for (std::size_t j = 0; j < k; ++j) {
        sa[j] = a[order[positions[j]]];
        sb[j] = b[order[positions[j]]];
    }
    for (std::size_t i = 0; i < count; ++i) {
        double best_distance = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            const double da = a[i] - sa[j];
            const double db = b[i] - sb[j];
            const double distance = da * da + db * db;
            if (distance < best_distance) {
                best_distance = distance;
                out[i] = j;
            }
        }
    }
    return out;
}

std::vector<std::size_t> assign_nearest(const RowMatrix& x, std::span<const std::size_t> rows, const RowMatrix& seeds) {
    std::vector<std::size_t> out(rows.size(), 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto row = x.row(static_cast<Index>(rows[r]));
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < seeds.rows(); ++j) {
            const double distance = (row - seeds.row(j)).squaredNorm();
            if (distance < best) {
                best = distance;
                out[r] = static_cast<std::size_t>(j);
            }
        }
    }
    return out;
}

RowMatrix farthest_first_seeds(const RowMatrix& x, std::span<const std::size_t> rows, std::size_t k) {
    const Index m = x.cols();
    if (rows.empty() || k == 0) return RowMatrix(0, m);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(m);
    for (const std::size_t r : rows) mean += x.row(static_cast<Index>(r));
    mean /= static_cast<double>(rows.size());

    std::size_t first = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double distance = (x.row(static_cast<Index>(rows[r])) - mean).squaredNorm();
        if (distance < best) {
            best = distance;
            first = r;
        }
    }
    std::vector<std::size_t> chosen{first};
    std::vector<double> nearest(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        nearest[r] = (x.row(static_cast<Index>(rows[r])) - x.row(static_cast<Index>(rows[first]))).squaredNorm();
    }
    while (chosen.size() < k) {
        std::size_t next = 0;
        double far = -1.0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (nearest[r] > far) {
                far = nearest[r];
                next = r;
            }
        }
        if (far <= 0.0) break;  // every remaining row duplicates a seed
        chosen.push_back(next);
        const auto seed = x.row(static_cast<Index>(rows[next]));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            nearest[r] = std::min(nearest[r], (x.row(static_cast<Index>(rows[r])) - seed).squaredNorm());
        }
    }
    RowMatrix seeds(static_cast<Index>(chosen.size()), m);
    for (std::size_t j = 0; j < chosen.size(); ++j) {
        seeds.row(static_cast<Index>(j)) = x.row(static_cast<Index>(rows[chosen[j]]));
    }
    return seeds;
}

std::vector<std::size_t> proportional_split(std::size_t total, std::span<const std::size_t> sizes) {
    const std::size_t groups = sizes.size();
    std::vector<std::size_t> alloc(groups, 0);
    const std::size_t sum = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (sum == 0) return alloc;
    const auto nonempty = static_cast<std::size_t>(std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }));
    const std::size_t target = std::max(nonempty, std::min(total, sum));

    std::vector<double> quota(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        quota[g] = static_cast<double>(total) * static_cast<double>(sizes[g]) / static_cast<double>(sum);
        if (sizes[g] == 0) continue;
        alloc[g] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(quota[g])), 1, sizes[g]);
    }
    std::size_t assigned = std::accumulate(alloc.begin(), alloc.end(), std::size_t{0});
    while (assigned < target) {
        std::size_t pick = groups;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < groups; ++g) {
            if (alloc[g] >= sizes[g]) continue;
            const double remainder = quota[g] - static_cast<double>(alloc[g]);
            if (remainder > best) {
                best = remainder;
                pick = g;
            }
        }
        ++alloc[pick];
        ++assigned;
    }
    while (assigned > target) {
        std::size_t pick = groups;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < groups; ++g) {
            if (alloc[g] <= 1) continue;
            const double remainder = quota[g] - static_cast<double>(alloc[g]);
            if (remainder < best) {
                best = remainder;
                pick = g;
            }
        }
        --alloc[pick];
        --assigned;
    }
    return alloc;
}

ClusterPartition init_lad_clusters(const Dataset& data, std::size_t k0, std::uint64_t seed) {
    const std::size_t n = data.n();
    const std::size_t m = data.m();
    if (k0 <= m) throw ConfigError("LAD needs more initial clusters than columns");
    if (k0 >= n) return ClusterPartition::singletons(n);

    CounterRng rng(seed, kSampleStream);
    const auto sample = sample_indices(n, initializer_sample_size(n, m), rng);
    const Dataset part = subset(data, sample);

    std::vector<double> response(data.y.data(), data.y.data() + n);
    std::vector<std::size_t> assignment;
    Eigen::ColPivHouseholderQR<Matrix> qr(part.x);
    qr.setThreshold(1e-10);
    if (static_cast<std::size_t>(qr.rank()) < m) {
        assignment = quantile_assign_1d(response, k0);
    } else {
        const LadSolution fit = solve_weighted_lad(part.x, part.y, Vector::Ones(part.x.rows()));
        const Vector residual = data.y - data.x * fit.beta;
        std::vector<double> r(residual.data(), residual.data() + n);
        assignment = quantile_assign_2d(r, response, k0);
    }
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> groups;
    append_groups(all, assignment, groups);
    return ClusterPartition(n, std::move(groups));
}

ClusterPartition init_svm_clusters(const Dataset& data, std::size_t k0, std::uint64_t seed, double penalty,
                                   const Kernel& kernel) {
    const std::size_t n = data.n();
    const auto positive = data.indices_with_label(1.0);
    const auto negative = data.indices_with_label(-1.0);
    if (positive.empty() || negative.empty()) throw DataError("SVM needs entries of both labels");
    if (positive.size() + negative.size() != n) throw DataError("SVM labels must be -1 or +1");
    if (k0 < 2) throw ConfigError("SVM needs at least 2 initial clusters");

    CounterRng rng(seed, kSampleStream);
    auto sample = sample_indices(n, initializer_sample_size(n, data.m()), rng);
    bool has_positive = false;
    bool has_negative = false;
    for (const std::size_t i : sample) (data.y[static_cast<Index>(i)] > 0 ? has_positive : has_negative) = true;
    if (!has_positive) sample.push_back(positive.front());
    if (!has_negative) sample.push_back(negative.front());
    std::sort(sample.begin(), sample.end());

    SvmInstance fit;
    const Dataset part = subset(data, sample);
    fit.x = part.x;
    fit.y = part.y;
    fit.weights = Vector::Ones(part.x.rows());
    fit.penalty = penalty;
    fit.kernel = kernel;
    const SvmSolution model = solve_weighted_svm(fit);

    Vector decision(static_cast<Index>(n));
    if (kernel.is_linear()) {
        decision = data.x * model.w;
        decision.array() += model.b;
    } else {
        const Vector coef = model.alpha.cwiseProduct(fit.y);
        constexpr Index block = 4096;
        for (Index start = 0; start < static_cast<Index>(n); start += block) {
            const Index rows = std::min(block, static_cast<Index>(n) - start);
            const RowMatrix chunk = data.x.middleRows(start, rows);
            decision.segment(start, rows) = cross_gram(chunk, fit.x, kernel) * coef;
        }
        decision.array() += model.b;
    }

    const std::array<std::size_t, 2> sizes{positive.size(), negative.size()};
    const auto counts = proportional_split(k0, sizes);
    std::vector<std::vector<std::size_t>> groups;
    for (int side = 0; side < 2; ++side) {
        const auto& rows = side == 0 ? positive : negative;
        std::vector<double> values(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) values[r] = decision[static_cast<Index>(rows[r])];
        const auto assignment = quantile_assign_1d(values, counts[static_cast<std::size_t>(side)]);
        append_groups(rows, assignment, groups);
    }
    return ClusterPartition(n, std::move(groups));
}

S3vmPartitions init_s3vm_clusters(const Dataset& data, std::size_t k0) {
    const auto positive = data.indices_with_label(1.0);
    const auto negative = data.indices_with_label(-1.0);
    const auto unlabeled = data.indices_with_label(0.0);
    const std::array<std::size_t, 3> sizes{positive.size(), negative.size(), unlabeled.size()};
    const auto split = proportional_split(k0, sizes);
    return init_s3vm_clusters(data, {split[0], split[1], split[2]});
}

S3vmPartitions init_s3vm_clusters(const Dataset& data, const std::array<std::size_t, 3>& counts) {
    const std::size_t n = data.n();
    const std::array<std::vector<std::size_t>, 3> rows{
        data.indices_with_label(1.0), data.indices_with_label(-1.0), data.indices_with_label(0.0)};
    if (rows[0].size() + rows[1].size() + rows[2].size() != n) {
        throw DataError("semi-supervised labels must be -1, +1 or 0 (unlabeled)");
    }
    std::vector<std::vector<std::size_t>> labeled_groups;
    std::vector<std::vector<std::size_t>> unlabeled_groups;
    for (std::size_t g = 0; g < 3; ++g) {
        if (rows[g].empty()) continue;
        if (counts[g] == 0) throw ConfigError("every non-empty group needs at least one cluster");
        auto& groups = g < 2 ? labeled_groups : unlabeled_groups;
        const RowMatrix seeds = farthest_first_seeds(data.x, rows[g], counts[g]);
        const auto assignment = assign_nearest(data.x, rows[g], seeds);
        append_groups(rows[g], assignment, groups);
    }
    return {ClusterPartition(n, std::move(labeled_groups)), ClusterPartition(n, std::move(unlabeled_groups))};
}

}  // namespace aid
