#pragma once

#include <cstddef>
#include <optional>

#include "aid/linalg.hpp"
#include "aid/partition.hpp"

namespace aid {

/// Comparison of an AID run with a direct solve of the same instance.
struct Metrics {
    double rho = 0.0;    ///< AID time / direct time
    double delta = 0.0;  ///< (E_aid - E_direct) / E_direct
    std::optional<double> gamma;  ///< classification rate difference, AID minus direct
    double final_rate = 0.0;      ///< r_T
    std::size_t iterations = 0;   ///< T
};

/// (aid - direct) / direct; 0 when both are 0 and +-inf when only direct is.
double relative_difference(double aid, double direct);

/// Share of labeled entries (y != 0) with y f > 0.
double classification_rate(const Vector& decision, const Vector& y);

/// Number of labeled entries whose decision value is within `tolerance` of 0;
/// these may flip between two solvers with equal objectives.
std::size_t near_ties(const Vector& decision, const Vector& y, double tolerance);

/// Median of the values (mean of the two middle values for even counts).
double median(Vector values);

/// Aggregation rates split by distance to the fitted model.
struct RateSplit {
    double threshold = 0.0;  ///< median |entry residual|
    std::size_t near_entries = 0;
    std::size_t far_entries = 0;
    std::size_t near_clusters = 0;
    std::size_t far_clusters = 0;
    double near_rate = 0.0;  ///< near_clusters / near_entries
    double far_rate = 0.0;
};

/// Entries with |r_i| <= median |r| are near. Each cluster is attributed to a
/// group by the residual of its centroid, measured against the same median.
RateSplit near_far_rates(const ClusterPartition& partition, const Vector& entry_residuals,
                         const Vector& cluster_residuals);

}  // namespace aid
