#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace aid {

/// Partition of a set of entry indices into non-empty, disjoint clusters.
///
/// The partition covers a subset of a universe `[0, universe)`: for LAD and
/// SVM it covers every entry, for semi-supervised data the labeled and the
/// unlabeled entries live in two separate partitions over the same universe.
/// Members of each cluster are kept in increasing order.
class ClusterPartition {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    ClusterPartition() = default;

    /// Builds from explicit clusters. Empty clusters are dropped; overlapping
    /// clusters or indices outside the universe throw std::invalid_argument.
    ClusterPartition(std::size_t universe, std::vector<std::vector<std::size_t>> clusters);

    /// One singleton per index of `entries`.
    static ClusterPartition singletons(std::size_t universe, std::span<const std::size_t> entries);
    /// One singleton per index of [0, universe).
    static ClusterPartition singletons(std::size_t universe);

    /// Groups `entries[r]` by `labels[r]`; clusters are ordered by label value.
    static ClusterPartition from_labels(std::size_t universe, std::span<const std::size_t> entries,
                                        std::span<const std::size_t> labels);

    std::size_t size() const noexcept { return clusters_.size(); }
    std::size_t universe() const noexcept { return assignment_.size(); }
    std::size_t entry_count() const noexcept { return entries_; }
    std::size_t generation() const noexcept { return generation_; }

    std::span<const std::size_t> members(std::size_t cluster) const { return clusters_.at(cluster); }
    const std::vector<std::vector<std::size_t>>& clusters() const noexcept { return clusters_; }

    /// Cluster id of `entry`, npos when the entry is not covered.
    std::size_t cluster_of(std::size_t entry) const { return assignment_.at(entry); }
    const std::vector<std::size_t>& assignment() const noexcept { return assignment_; }

    bool all_singletons() const noexcept { return clusters_.size() == entries_; }

    /// Replaces `cluster` by the non-empty `groups`. The first non-empty group
    /// keeps the cluster id, the others are appended in order. Returns true if
    /// the cluster was actually divided. Throws std::invalid_argument when the
    /// groups are not a partition of the cluster's members.
    bool split_cluster(std::size_t cluster, std::vector<std::vector<std::size_t>> groups);

    /// Throws std::logic_error when an internal invariant is broken.
    void check_invariants() const;

    friend bool operator==(const ClusterPartition& a, const ClusterPartition& b) {
        return a.clusters_ == b.clusters_ && a.assignment_ == b.assignment_;
    }

private:
    std::vector<std::vector<std::size_t>> clusters_;
    std::vector<std::size_t> assignment_;
    std::size_t entries_ = 0;
    std::size_t generation_ = 0;
};

}  // namespace aid
