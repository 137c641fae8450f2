#include "aid/lad.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace aid::lad {

LadAggregate aggregate(const ClusterPartition& partition, const Dataset& data) {
    const auto k = static_cast<Eigen::Index>(partition.size());
    LadAggregate agg;
    agg.x = RowMatrix::Zero(k, data.x.cols());
    agg.y = Vector::Zero(k);
    agg.weights = Vector::Zero(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto members = partition.members(static_cast<std::size_t>(c));
        for (const std::size_t i : members) {
            agg.x.row(c) += data.x.row(static_cast<Eigen::Index>(i));
            agg.y(c) += data.y(static_cast<Eigen::Index>(i));
        }
        const auto size = static_cast<double>(members.size());
        agg.x.row(c) /= size;
        agg.y(c) /= size;
        agg.weights(c) = size;
    }
    return agg;
}

std::pair<LadModel, double> solve(const LadAggregate& aggregate, const LadSolverOptions& options) {
    LadSolution sol = solve_weighted_lad(aggregate.x, aggregate.y, aggregate.weights, options);
    return {LadModel{std::move(sol.beta)}, sol.objective};
}

Vector residuals(const LadModel& model, const Dataset& data) { return data.y - data.x * model.beta; }

double evaluate(const LadModel& model, const Dataset& data) {
    return weighted_absolute_loss(data.x, data.y, Vector::Ones(data.x.rows()), model.beta);
}

bool positive_side(double residual, double response) { return residual > 1e-9 * (1.0 + std::abs(response)); }

namespace {

// 0 = all nonpositive, 1 = all positive, 2 = mixed.
int cluster_sides(std::span<const std::size_t> members, const Vector& r, const Dataset& data) {
    bool pos = false;
    bool nonpos = false;
    for (const std::size_t i : members) {
        const auto e = static_cast<Eigen::Index>(i);
        (positive_side(r(e), data.y(e)) ? pos : nonpos) = true;
        if (pos && nonpos) return 2;
    }
    return pos ? 1 : 0;
}

}  // namespace

bool check_optimality(const ClusterPartition& partition, const Vector& r, const Dataset& data) {
    for (std::size_t c = 0; c < partition.size(); ++c) {
        if (cluster_sides(partition.members(c), r, data) == 2) return false;
    }
    return true;
}

bool check_optimality(const ClusterPartition& partition, const LadModel& model, const Dataset& data) {
    return check_optimality(partition, residuals(model, data), data);
}

bool decluster(ClusterPartition& partition, const Vector& r, const Dataset& data) {
    bool split = false;
    // Appended clusters are already pure, so only the original ids are visited.
    const std::size_t count = partition.size();
    for (std::size_t c = 0; c < count; ++c) {
        const auto members = partition.members(c);
        if (cluster_sides(members, r, data) != 2) continue;
        std::vector<std::size_t> plus;
        std::vector<std::size_t> minus;
        for (const std::size_t i : members) {
            const auto e = static_cast<Eigen::Index>(i);
            (positive_side(r(e), data.y(e)) ? plus : minus).push_back(i);
        }
        split = partition.split_cluster(c, {std::move(plus), std::move(minus)}) || split;
    }
    return split;
}

bool decluster(ClusterPartition& partition, const LadModel& model, const Dataset& data) {
    return decluster(partition, residuals(model, data), data);
}

LadProblem::LadProblem(const Dataset& data, LadSolverOptions options) : data_(data), options_(options) {}

void LadProblem::initialize(std::size_t k0, std::uint64_t seed) { partition_ = init_lad_clusters(data_, k0, seed); }

void LadProblem::initialize(ClusterPartition partition) { partition_ = std::move(partition); }

double LadProblem::solve() {
    aggregate_ = aggregate(partition_, data_);
    auto [model, objective] = lad::solve(aggregate_, options_);
    model_ = std::move(model);
    return objective;
}

double LadProblem::evaluate() {
    residuals_ = residuals(model_, data_);
    return lad::evaluate(model_, data_);
}

bool LadProblem::optimality_condition() const { return check_optimality(partition_, residuals_, data_); }

bool LadProblem::decluster() { return lad::decluster(partition_, residuals_, data_); }

}  // namespace aid::lad
