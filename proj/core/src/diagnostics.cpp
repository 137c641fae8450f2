#include "aid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aid {

double relative_difference(double aid, double direct) {
    if (direct != 0.0) return (aid - direct) / std::abs(direct);
    if (aid == 0.0) return 0.0;
    return aid > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

double classification_rate(const Vector& decision, const Vector& y) {
    std::size_t labeled = 0;
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == 0.0) continue;
        ++labeled;
        if (y(i) * decision(i) > 0.0) ++correct;
    }
    return labeled == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(labeled);
}

std::size_t near_ties(const Vector& decision, const Vector& y, double tolerance) {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) != 0.0 && std::abs(decision(i)) <= tolerance) ++count;
    }
    return count;
}

double median(Vector values) {
    if (values.size() == 0) throw std::invalid_argument("median of an empty vector");
    const auto n = static_cast<std::size_t>(values.size());
    double* data = values.data();
    std::nth_element(data, data + n / 2, data + n);
    const double upper = data[n / 2];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(data, data + n / 2);
    return 0.5 * (lower + upper);
}

RateSplit near_far_rates(const ClusterPartition& partition, const Vector& entry_residuals,
                         const Vector& cluster_residuals) {
    if (cluster_residuals.size() != static_cast<Eigen::Index>(partition.size())) {
        throw std::invalid_argument("one centroid residual per cluster is required");
    }
    Vector magnitudes(static_cast<Eigen::Index>(partition.entry_count()));
    Eigen::Index next = 0;
    for (const auto& members : partition.clusters()) {
        for (const std::size_t i : members) magnitudes(next++) = std::abs(entry_residuals(static_cast<Eigen::Index>(i)));
    }
    RateSplit out;
    out.threshold = median(magnitudes);
    for (Eigen::Index i = 0; i < magnitudes.size(); ++i) {
        (magnitudes(i) <= out.threshold ? out.near_entries : out.far_entries) += 1;
    }
    for (Eigen::Index c = 0; c < cluster_residuals.size(); ++c) {
        (std::abs(cluster_residuals(c)) <= out.threshold ? out.near_clusters : out.far_clusters) += 1;
    }
    if (out.near_entries > 0) out.near_rate = static_cast<double>(out.near_clusters) / static_cast<double>(out.near_entries);
    if (out.far_entries > 0) out.far_rate = static_cast<double>(out.far_clusters) / static_cast<double>(out.far_entries);
    return out;
}

}  // namespace aid
