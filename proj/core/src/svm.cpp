#include "aid/svm.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aid/error.hpp"

namespace aid::svm {

namespace {

using Index = Eigen::Index;

constexpr Index kDecisionBlock = 4096;

}  // namespace

Vector decision_values(const SvmModel& model, const RowMatrix& x) {
    if (model.kernel.is_linear() && model.w.size() == x.cols()) {
        Vector f = x * model.w;
        f.array() += model.b;
        return f;
    }
    Vector f = Vector::Constant(x.rows(), model.b);
    if (model.support.rows() == 0) return f;
    for (Index start = 0; start < x.rows(); start += kDecisionBlock) {
        const Index rows = std::min(kDecisionBlock, x.rows() - start);
        const RowMatrix block = x.middleRows(start, rows);
        f.segment(start, rows) += cross_gram(block, model.support, model.kernel) * model.coef;
    }
    return f;
}

Vector cluster_labels(const ClusterPartition& partition, const Vector& y) {
    Vector labels(static_cast<Index>(partition.size()));
    for (std::size_t c = 0; c < partition.size(); ++c) {
        const auto members = partition.members(c);
        const double label = y(static_cast<Index>(members.front()));
        for (const std::size_t i : members) {
            if (y(static_cast<Index>(i)) != label) {
                throw std::invalid_argument("cluster " + std::to_string(c) + " mixes labels");
            }
        }
        labels(static_cast<Index>(c)) = label;
    }
    return labels;
}

SvmAggregate aggregate_linear(const ClusterPartition& partition, const Dataset& data) {
    const auto k = static_cast<Index>(partition.size());
    SvmAggregate agg;
    agg.y = cluster_labels(partition, data.y);
    agg.x = RowMatrix::Zero(k, data.x.cols());
    agg.weights.resize(k);
    for (Index c = 0; c < k; ++c) {
        const auto members = partition.members(static_cast<std::size_t>(c));
        for (const std::size_t i : members) agg.x.row(c) += data.x.row(static_cast<Index>(i));
        agg.weights(c) = static_cast<double>(members.size());
        agg.x.row(c) /= agg.weights(c);
    }
    return agg;
}

Matrix cluster_column_means(const ClusterPartition& partition, const Matrix& gram) {
    const auto k = static_cast<Index>(partition.size());
    Matrix s = Matrix::Zero(gram.rows(), k);
    for (Index c = 0; c < k; ++c) {
        const auto members = partition.members(static_cast<std::size_t>(c));
        for (const std::size_t j : members) s.col(c) += gram.col(static_cast<Index>(j));
        s.col(c) /= static_cast<double>(members.size());
    }
    return s;
}

namespace {

Matrix block_means_from_columns(const ClusterPartition& partition, const Matrix& s) {
    const auto k = static_cast<Index>(partition.size());
    Matrix agg = Matrix::Zero(k, k);
    for (Index c = 0; c < k; ++c) {
        const auto members = partition.members(static_cast<std::size_t>(c));
        for (const std::size_t i : members) agg.row(c) += s.row(static_cast<Index>(i));
        agg.row(c) /= static_cast<double>(members.size());
    }
    const Matrix sym = 0.5 * (agg + agg.transpose());
    return sym;
}

}  // namespace

Matrix aggregate_kernel(const ClusterPartition& partition, const Matrix& gram) {
    return block_means_from_columns(partition, cluster_column_means(partition, gram));
}

Vector slacks(const Vector& decision, const Vector& y) {
    return (1.0 - y.array() * decision.array()).max(0.0).matrix();
}

double primal_objective(double norm_squared, const Vector& xi, double penalty) {
    return 0.5 * norm_squared + penalty * xi.sum();
}

Vector convert_to_aggregated(const Vector& xi, const ClusterPartition& partition) {
    Vector out(static_cast<Index>(partition.size()));
    for (std::size_t c = 0; c < partition.size(); ++c) {
        const auto members = partition.members(c);
        double sum = 0.0;
        for (const std::size_t i : members) sum += xi(static_cast<Index>(i));
        out(static_cast<Index>(c)) = sum / static_cast<double>(members.size());
    }
    return out;
}

Vector disaggregate_dual(const Vector& alpha, const ClusterPartition& partition, double penalty) {
    if (alpha.size() != static_cast<Index>(partition.size())) {
        throw std::invalid_argument("dual vector does not match the partition");
    }
    Vector out = Vector::Zero(static_cast<Index>(partition.universe()));
    for (std::size_t c = 0; c < partition.size(); ++c) {
        const auto members = partition.members(c);
        const double size = static_cast<double>(members.size());
        const double a = alpha(static_cast<Index>(c));
        if (a < 0.0 || a > size * penalty) {
            throw std::invalid_argument("aggregated dual value outside [0, |C_k| M] for cluster " +
                                        std::to_string(c));
        }
        for (const std::size_t i : members) out(static_cast<Index>(i)) = a / size;
    }
    return out;
}

bool positive_hinge(double hinge) { return hinge > 1e-9; }

namespace {

int cluster_sides(std::span<const std::size_t> members, const Vector& f, const Vector& y) {
    bool pos = false;
    bool nonpos = false;
    for (const std::size_t i : members) {
        const auto e = static_cast<Index>(i);
        (positive_hinge(1.0 - y(e) * f(e)) ? pos : nonpos) = true;
        if (pos && nonpos) return 2;
    }
    return pos ? 1 : 0;
}

}  // namespace

bool check_optimality(const ClusterPartition& partition, const Vector& decision, const Vector& y) {
    for (std::size_t c = 0; c < partition.size(); ++c) {
        if (cluster_sides(partition.members(c), decision, y) == 2) return false;
    }
    return true;
}

bool decluster(ClusterPartition& partition, const Vector& decision, const Vector& y) {
    bool split = false;
    const std::size_t count = partition.size();
    for (std::size_t c = 0; c < count; ++c) {
        const auto members = partition.members(c);
        if (cluster_sides(members, decision, y) != 2) continue;
        std::vector<std::size_t> plus;
        std::vector<std::size_t> minus;
        for (const std::size_t i : members) {
            const auto e = static_cast<Index>(i);
            (positive_hinge(1.0 - y(e) * decision(e)) ? plus : minus).push_back(i);
        }
        split = partition.split_cluster(c, {std::move(plus), std::move(minus)}) || split;
    }
    return split;
}

SvmSolution solve_direct(const Dataset& data, double penalty, const Kernel& kernel, const SvmSolverOptions& options) {
    SvmInstance inst;
    inst.x = data.x;
    inst.y = data.y;
    inst.weights = Vector::Ones(data.x.rows());
    inst.penalty = penalty;
    inst.kernel = kernel;
    return solve_weighted_svm(inst, options);
}

SvmProblem::SvmProblem(const Dataset& data, SvmOptions options) : data_(data), options_(std::move(options)) {
    data_.validate(TaskKind::classification);
    if (!(options_.penalty > 0.0)) throw ConfigError("penalty M must be positive");
    gram_path_ = options_.gram_path || !options_.kernel.is_linear();
    if (gram_path_) {
        if (data_.n() > max_gram_entries) {
            throw ConfigError("kernel aggregation stores the full Gram matrix and supports at most " +
                              std::to_string(max_gram_entries) + " entries");
        }
        gram_ = gram_matrix(data_.x, options_.kernel);
    }
}

void SvmProblem::initialize(std::size_t k0, std::uint64_t seed) {
    partition_ = init_svm_clusters(data_, k0, seed, options_.penalty, options_.kernel);
}

void SvmProblem::initialize(ClusterPartition partition) {
    cluster_labels(partition, data_.y);
    partition_ = std::move(partition);
}

double SvmProblem::solve() {
    SvmInstance inst;
    if (gram_path_) {
        column_means_ = cluster_column_means(partition_, gram_);
        aggregate_ = SvmAggregate{};
        aggregate_.gram = block_means_from_columns(partition_, column_means_);
        aggregate_.y = cluster_labels(partition_, data_.y);
        aggregate_.weights.resize(static_cast<Index>(partition_.size()));
        for (std::size_t c = 0; c < partition_.size(); ++c) {
            aggregate_.weights(static_cast<Index>(c)) = static_cast<double>(partition_.members(c).size());
        }
        inst.gram = aggregate_.gram;
    } else {
        aggregate_ = aggregate_linear(partition_, data_);
        inst.x = aggregate_.x;
    }
    inst.y = aggregate_.y;
    inst.weights = aggregate_.weights;
    inst.penalty = options_.penalty;
    inst.kernel = options_.kernel;
    solution_ = solve_weighted_svm(inst, options_.solver);
    build_model();
    return solution_.primal;
}

void SvmProblem::build_model() {
    model_ = SvmModel{};
    model_.kernel = options_.kernel;
    model_.b = solution_.b;
    const Vector coef = solution_.alpha.cwiseProduct(aggregate_.y);
    if (options_.kernel.is_linear()) {
        if (gram_path_) {
            // w = sum_k alpha_k y_k xbar_k, accumulated over members.
            model_.w = Vector::Zero(data_.x.cols());
            for (std::size_t c = 0; c < partition_.size(); ++c) {
                const auto members = partition_.members(c);
                const double scale = coef(static_cast<Index>(c)) / static_cast<double>(members.size());
                if (scale == 0.0) continue;
                for (const std::size_t i : members) model_.w += scale * data_.x.row(static_cast<Index>(i)).transpose();
            }
        } else {
            model_.w = solution_.w;
        }
        return;
    }
    std::vector<std::size_t> rows;
    std::vector<double> values;
    for (std::size_t c = 0; c < partition_.size(); ++c) {
        const double a = coef(static_cast<Index>(c));
        if (a == 0.0) continue;
        const auto members = partition_.members(c);
        for (const std::size_t i : members) {
            rows.push_back(i);
            values.push_back(a / static_cast<double>(members.size()));
        }
    }
    model_.support.resize(static_cast<Index>(rows.size()), data_.x.cols());
    model_.coef.resize(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        model_.support.row(static_cast<Index>(r)) = data_.x.row(static_cast<Index>(rows[r]));
        model_.coef(static_cast<Index>(r)) = values[r];
    }
}

double SvmProblem::evaluate() {
    double norm_squared = 0.0;
    if (gram_path_) {
        decision_ = column_means_ * solution_.alpha.cwiseProduct(aggregate_.y);
        decision_.array() += solution_.b;
        norm_squared = solution_.norm_squared;
    } else {
        decision_ = data_.x * model_.w;
        decision_.array() += model_.b;
        norm_squared = model_.w.squaredNorm();
    }
    xi_ = slacks(decision_, data_.y);
    return primal_objective(norm_squared, xi_, options_.penalty);
}

bool SvmProblem::optimality_condition() const { return check_optimality(partition_, decision_, data_.y); }

bool SvmProblem::decluster() { return svm::decluster(partition_, decision_, data_.y); }

Vector SvmProblem::disaggregated_dual() const {
    return disaggregate_dual(solution_.alpha, partition_, options_.penalty);
}

}  // namespace aid::svm
