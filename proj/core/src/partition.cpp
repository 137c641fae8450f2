#include "aid/partition.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace aid {

ClusterPartition::ClusterPartition(std::size_t universe, std::vector<std::vector<std::size_t>> clusters)
    : assignment_(universe, npos) {
    clusters_.reserve(clusters.size());
    for (auto& group : clusters) {
        if (group.empty()) continue;
        std::sort(group.begin(), group.end());
        const std::size_t id = clusters_.size();
        for (const std::size_t entry : group) {
            if (entry >= universe) {
                throw std::invalid_argument("entry " + std::to_string(entry) + " outside universe");
            }
            if (assignment_[entry] != npos) {
                throw std::invalid_argument("entry " + std::to_string(entry) + " in two clusters");
            }
            assignment_[entry] = id;
        }
        entries_ += group.size();
        clusters_.push_back(std::move(group));
    }
}

ClusterPartition ClusterPartition::singletons(std::size_t universe, std::span<const std::size_t> entries) {
    std::vector<std::vector<std::size_t>> groups;
    groups.reserve(entries.size());
    for (const std::size_t e : entries) groups.push_back({e});
    return ClusterPartition(universe, std::move(groups));
}

ClusterPartition ClusterPartition::singletons(std::size_t universe) {
    std::vector<std::vector<std::size_t>> groups(universe);
    for (std::size_t i = 0; i < universe; ++i) groups[i] = {i};
    return ClusterPartition(universe, std::move(groups));
}

ClusterPartition ClusterPartition::from_labels(std::size_t universe, std::span<const std::size_t> entries,
                                               std::span<const std::size_t> labels) {
    if (entries.size() != labels.size()) {
        throw std::invalid_argument("entries and labels differ in length");
    }
    std::map<std::size_t, std::vector<std::size_t>> by_label;
    for (std::size_t r = 0; r < entries.size(); ++r) by_label[labels[r]].push_back(entries[r]);
    std::vector<std::vector<std::size_t>> groups;
    groups.reserve(by_label.size());
    for (auto& [label, group] : by_label) groups.push_back(std::move(group));
    return ClusterPartition(universe, std::move(groups));
}

bool ClusterPartition::split_cluster(std::size_t cluster, std::vector<std::vector<std::size_t>> groups) {
    if (cluster >= clusters_.size()) throw std::invalid_argument("no such cluster");
    const auto& current = clusters_[cluster];

    std::vector<std::size_t> combined;
    combined.reserve(current.size());
    for (const auto& g : groups) combined.insert(combined.end(), g.begin(), g.end());
    std::sort(combined.begin(), combined.end());
    if (combined != current) {
        throw std::invalid_argument("split groups do not partition cluster " + std::to_string(cluster));
    }

    std::erase_if(groups, [](const auto& g) { return g.empty(); });
    if (groups.empty()) throw std::invalid_argument("split needs at least one non-empty group");
    if (groups.size() == 1) return false;

    for (auto& g : groups) std::sort(g.begin(), g.end());
    clusters_[cluster] = std::move(groups.front());
    for (std::size_t g = 1; g < groups.size(); ++g) {
        const std::size_t id = clusters_.size();
        for (const std::size_t entry : groups[g]) assignment_[entry] = id;
        clusters_.push_back(std::move(groups[g]));
    }
    ++generation_;
    return true;
}

void ClusterPartition::check_invariants() const {
    std::size_t covered = 0;
    for (std::size_t k = 0; k < clusters_.size(); ++k) {
        const auto& group = clusters_[k];
        if (group.empty()) throw std::logic_error("empty cluster " + std::to_string(k));
        if (!std::is_sorted(group.begin(), group.end())) throw std::logic_error("unsorted cluster");
        for (const std::size_t e : group) {
            if (e >= assignment_.size() || assignment_[e] != k) {
                throw std::logic_error("assignment disagrees with members for entry " + std::to_string(e));
            }
        }
        covered += group.size();
    }
    const auto assigned = static_cast<std::size_t>(
        std::count_if(assignment_.begin(), assignment_.end(), [](std::size_t a) { return a != npos; }));
    if (covered != entries_ || assigned != entries_) throw std::logic_error("entry count mismatch");
}

}  // namespace aid
