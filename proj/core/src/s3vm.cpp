#include "aid/s3vm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "aid/error.hpp"

namespace aid::s3vm {

namespace {

using Index = Eigen::Index;

constexpr double kEps = 1e-9;

}  // namespace

std::string_view to_string(BalanceMode mode) {
    switch (mode) {
        case BalanceMode::none:
            return "none";
        case BalanceMode::constraint:
            return "constraint";
        case BalanceMode::cost:
            return "cost";
    }
    return "none";
}

BalanceMode parse_balance(std::string_view text) {
    if (text == "none") return BalanceMode::none;
    if (text == "constraint") return BalanceMode::constraint;
    if (text == "cost") return BalanceMode::cost;
    throw std::invalid_argument("unknown balance mode '" + std::string(text) + "'");
}

Vector labeled_costs(const Dataset& data, const S3vmOptions& options) {
    const auto n = static_cast<Index>(data.n());
    double plus_mult = 1.0;
    double minus_mult = 1.0;
    if (options.balance == BalanceMode::cost) {
        const auto plus = static_cast<double>((data.y.array() == 1.0).count());
        const auto minus = static_cast<double>((data.y.array() == -1.0).count());
        if (plus > 0.0 && minus > 0.0) {
            minus_mult = std::max(1.0, minus / plus);
            plus_mult = std::max(1.0, plus / minus);
            if (options.balance_cost_swapped) std::swap(minus_mult, plus_mult);
        }
    }
    Vector cost = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        if (data.y(i) == 1.0) cost(i) = options.labeled_penalty * plus_mult;
        if (data.y(i) == -1.0) cost(i) = options.labeled_penalty * minus_mult;
    }
    return cost;
}

namespace {

S3vmBnbInstance aggregate_with_costs(const S3vmPartitions& partitions, const Dataset& data, const Vector& cost,
                                     const S3vmOptions& options) {
    const Index m = data.x.cols();
    S3vmBnbInstance inst;
    const auto kl = static_cast<Index>(partitions.labeled.size());
    inst.labeled_x = RowMatrix::Zero(kl, m);
    inst.labeled_y.resize(kl);
    inst.labeled_cost = Vector::Zero(kl);
    for (Index c = 0; c < kl; ++c) {
        const auto members = partitions.labeled.members(static_cast<std::size_t>(c));
        const double label = data.y(static_cast<Index>(members.front()));
        for (const std::size_t i : members) {
            const auto e = static_cast<Index>(i);
            if (data.y(e) != label) throw std::invalid_argument("labeled cluster " + std::to_string(c) + " mixes labels");
            inst.labeled_x.row(c) += data.x.row(e);
            inst.labeled_cost(c) += cost(e);
        }
        inst.labeled_x.row(c) /= static_cast<double>(members.size());
        inst.labeled_y(c) = label;
    }
    const auto ku = static_cast<Index>(partitions.unlabeled.size());
    inst.unlabeled_x = RowMatrix::Zero(ku, m);
    inst.unlabeled_cost.resize(ku);
    for (Index c = 0; c < ku; ++c) {
        const auto members = partitions.unlabeled.members(static_cast<std::size_t>(c));
        for (const std::size_t i : members) inst.unlabeled_x.row(c) += data.x.row(static_cast<Index>(i));
        const auto size = static_cast<double>(members.size());
        inst.unlabeled_x.row(c) /= size;
        inst.unlabeled_cost(c) = options.unlabeled_penalty * size;
    }
    if (options.balance == BalanceMode::constraint) {
        const auto unlabeled = data.unlabeled_indices();
        const auto labeled = data.labeled_indices();
        if (!unlabeled.empty() && !labeled.empty()) {
            BalanceTarget target;
            target.center = Vector::Zero(m);
            for (const std::size_t i : unlabeled) target.center += data.x.row(static_cast<Index>(i)).transpose();
            target.center /= static_cast<double>(unlabeled.size());
            double sum = 0.0;
            for (const std::size_t i : labeled) sum += data.y(static_cast<Index>(i));
            target.target = sum / static_cast<double>(labeled.size());
            inst.balance = std::move(target);
        }
    }
    return inst;
}

}  // namespace

S3vmBnbInstance aggregate(const S3vmPartitions& partitions, const Dataset& data, const S3vmOptions& options) {
    return aggregate_with_costs(partitions, data, labeled_costs(data, options), options);
}

std::vector<int> assign_labels(const Vector& w, double b, const Dataset& data,
                               const std::vector<std::size_t>& unlabeled) {
    std::vector<int> d;
    d.reserve(unlabeled.size());
    for (const std::size_t i : unlabeled) d.push_back(data.x.row(static_cast<Index>(i)).dot(w) + b >= 0.0 ? 1 : -1);
    return d;
}

bool positive_value(double value) { return value > kEps; }

std::vector<MarginSet> classify_margins(const Vector& decision, const Dataset& data, const std::vector<int>& d) {
    std::vector<MarginSet> sets(data.n());
    std::size_t u = 0;
    for (Index i = 0; i < static_cast<Index>(data.n()); ++i) {
        const double f = decision(i);
        const double y = data.y(i);
        if (y != 0.0) {
            sets[static_cast<std::size_t>(i)] =
                positive_value(1.0 - y * f) ? MarginSet::labeled_positive : MarginSet::labeled_nonpositive;
            continue;
        }
        if (u >= d.size()) throw std::invalid_argument("fewer labels than unlabeled entries");
        const bool hinge = positive_value(1.0 - d[u++] * f);
        const bool side = positive_value(f);
        sets[static_cast<std::size_t>(i)] = hinge ? (side ? MarginSet::plus_plus : MarginSet::plus_minus)
                                                  : (side ? MarginSet::minus_plus : MarginSet::minus_minus);
    }
    if (u != d.size()) throw std::invalid_argument("more labels than unlabeled entries");
    return sets;
}

std::vector<MarginSet> classify_margins(const Vector& decision, const Dataset& data) {
    std::vector<int> d;
    for (Index i = 0; i < static_cast<Index>(data.n()); ++i) {
        if (data.y(i) == 0.0) d.push_back(decision(i) >= 0.0 ? 1 : -1);
    }
    return classify_margins(decision, data, d);
}

namespace {

// Step 2(a): a labeled cluster stays whole when its hinge arguments are all
// nonpositive or all nonnegative; entries on the boundary fit either case.
bool labeled_uniform(std::span<const std::size_t> members, const Vector& f, const Dataset& data) {
    bool all_nonpositive = true;
    bool all_nonnegative = true;
    for (const std::size_t i : members) {
        const auto e = static_cast<Index>(i);
        const double h = 1.0 - data.y(e) * f(e);
        all_nonpositive = all_nonpositive && h <= kEps;
        all_nonnegative = all_nonnegative && h >= -kEps;
        if (!all_nonpositive && !all_nonnegative) return false;
    }
    return true;
}

bool unlabeled_uniform(std::span<const std::size_t> members, const std::vector<MarginSet>& sets) {
    const MarginSet first = sets[members.front()];
    return std::all_of(members.begin(), members.end(), [&](std::size_t i) { return sets[i] == first; });
}

}  // namespace

bool check_optimality(const S3vmPartitions& partitions, const std::vector<MarginSet>& sets, const Vector& decision,
                      const Dataset& data) {
    for (std::size_t c = 0; c < partitions.labeled.size(); ++c) {
        if (!labeled_uniform(partitions.labeled.members(c), decision, data)) return false;
    }
    for (std::size_t c = 0; c < partitions.unlabeled.size(); ++c) {
        if (!unlabeled_uniform(partitions.unlabeled.members(c), sets)) return false;
    }
    return true;
}

bool decluster(S3vmPartitions& partitions, const std::vector<MarginSet>& sets, const Vector& decision,
               const Dataset& data) {
    bool split = false;
    const std::size_t labeled = partitions.labeled.size();
    for (std::size_t c = 0; c < labeled; ++c) {
        const auto members = partitions.labeled.members(c);
        if (labeled_uniform(members, decision, data)) continue;
        std::vector<std::size_t> plus;
        std::vector<std::size_t> minus;
        for (const std::size_t i : members) {
            (sets[i] == MarginSet::labeled_positive ? plus : minus).push_back(i);
        }
        split = partitions.labeled.split_cluster(c, {std::move(plus), std::move(minus)}) || split;
    }
    const std::size_t unlabeled = partitions.unlabeled.size();
    for (std::size_t c = 0; c < unlabeled; ++c) {
        const auto members = partitions.unlabeled.members(c);
        if (unlabeled_uniform(members, sets)) continue;
        std::array<std::vector<std::size_t>, 4> groups;
        for (const std::size_t i : members) {
            groups[static_cast<std::size_t>(sets[i]) - static_cast<std::size_t>(MarginSet::plus_plus)].push_back(i);
        }
        split = partitions.unlabeled.split_cluster(c, {groups.begin(), groups.end()}) || split;
    }
    return split;
}

double evaluate(const Vector& w, double b, const Dataset& data, const Vector& labeled_cost, double unlabeled_penalty) {
    long double total = 0.5L * w.squaredNorm();
    for (Index i = 0; i < static_cast<Index>(data.n()); ++i) {
        const double f = data.x.row(i).dot(w) + b;
        const double y = data.y(i);
        if (y != 0.0) {
            total += static_cast<long double>(labeled_cost(i)) * std::max(0.0, 1.0 - y * f);
        } else {
            const double d = f >= 0.0 ? 1.0 : -1.0;
            total += static_cast<long double>(unlabeled_penalty) * std::max(0.0, 1.0 - d * f);
        }
    }
    return static_cast<double>(total);
}

S3vmProblem::S3vmProblem(const Dataset& data, S3vmOptions options) : data_(data), options_(std::move(options)) {
    data_.validate(TaskKind::semi_supervised);
    if (!(options_.labeled_penalty > 0.0) || !(options_.unlabeled_penalty > 0.0)) {
        throw ConfigError("penalties Ml and Mu must be positive");
    }
    const bool plus = (data_.y.array() == 1.0).any();
    const bool minus = (data_.y.array() == -1.0).any();
    const bool fixed_bias = options_.balance == BalanceMode::constraint && plus != minus &&
                            data_.unlabeled_indices().size() > 0;
    if (!(plus && minus) && !fixed_bias) throw DataError("semi-supervised data needs labeled entries of both classes");
    unlabeled_ = data_.unlabeled_indices();
    labeled_cost_ = labeled_costs(data_, options_);
}

void S3vmProblem::initialize(std::size_t k0, std::uint64_t) { partitions_ = init_s3vm_clusters(data_, k0); }

void S3vmProblem::initialize(S3vmPartitions partitions) { partitions_ = std::move(partitions); }

double S3vmProblem::solve() {
    const S3vmBnbInstance inst = aggregate_with_costs(partitions_, data_, labeled_cost_, options_);
    result_ = solve_s3vm_bnb(inst, options_.bnb);
    model_.w = result_.w;
    model_.b = result_.b;
    model_.d = assign_labels(model_.w, model_.b, data_, unlabeled_);
    return result_.objective;
}

double S3vmProblem::evaluate() {
    decision_ = data_.x * model_.w;
    decision_.array() += model_.b;
    sets_ = classify_margins(decision_, data_, model_.d);
    return s3vm::evaluate(model_.w, model_.b, data_, labeled_cost_, options_.unlabeled_penalty);
}

bool S3vmProblem::optimality_condition() const { return check_optimality(partitions_, sets_, decision_, data_); }

bool S3vmProblem::decluster() { return s3vm::decluster(partitions_, sets_, decision_, data_); }

}  // namespace aid::s3vm
