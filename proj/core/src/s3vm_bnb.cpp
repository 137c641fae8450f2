#include "aid/s3vm_bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace aid {

namespace {

using Index = Eigen::Index;

struct Relaxation {
    Vector w;
    double b = 0.0;
    double value = 0.0;
};

struct Node {
    std::vector<signed char> d;  // 0 = undecided
    Relaxation relaxation;
    std::size_t sequence = 0;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.relaxation.value != b.relaxation.value) return a.relaxation.value > b.relaxation.value;
        return a.sequence > b.sequence;
    }
};

class Search {
public:
    Search(const S3vmBnbInstance& in, const S3vmBnbOptions& options) : in_(in), options_(options) {}

    // Convex SVM over labeled entities plus unlabeled ones with d != 0.
    Relaxation relax(const std::vector<signed char>& d) const {
        const Index l = in_.labeled_x.rows();
        const Index m = in_.labeled_x.cols();
        Index decided = 0;
        for (const auto v : d) decided += v != 0 ? 1 : 0;

        SvmInstance svm;
        svm.x.resize(l + decided, m);
        svm.y.resize(l + decided);
        svm.weights.resize(l + decided);
        svm.penalty = 1.0;
        svm.x.topRows(l) = in_.labeled_x;
        svm.y.head(l) = in_.labeled_y;
        svm.weights.head(l) = in_.labeled_cost;
        Index row = l;
        for (std::size_t u = 0; u < d.size(); ++u) {
            if (d[u] == 0) continue;
            const auto ui = static_cast<Index>(u);
            svm.x.row(row) = in_.unlabeled_x.row(ui);
            svm.y[row] = d[u];
            svm.weights[row] = in_.unlabeled_cost[ui];
            ++row;
        }
        if (in_.balance) {
            svm.x.rowwise() -= in_.balance->center.transpose();
            svm.fixed_bias = in_.balance->target;
        }

        Relaxation out;
        if (svm.y.size() == 0) {
            out.w = Vector::Zero(m);
            out.b = in_.balance ? in_.balance->target : 0.0;
            return out;
        }
        const SvmSolution s = solve_weighted_svm(svm, options_.svm);
        out.w = s.w;
        out.b = in_.balance ? in_.balance->target - s.w.dot(in_.balance->center) : s.b;
        out.value = s.primal;
        return out;
    }

    S3vmBnbResult run() {
        const auto ku = static_cast<std::size_t>(in_.unlabeled_x.rows());
        const auto start = std::chrono::steady_clock::now();
        std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
        std::size_t sequence = 0;

        Node root;
        root.d.assign(ku, 0);
        root.relaxation = relax(root.d);
        root.sequence = sequence++;
        result_.nodes = 1;
        consider(root);
        open.push(std::move(root));

        bool complete = true;
        while (!open.empty()) {
            Node node = open.top();
            open.pop();
            if (prunable(node.relaxation.value)) continue;

            const Index branch = branching_index(node);
            if (branch < 0) continue;  // completion is exact and already considered

            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (elapsed >= options_.time_limit ||
                (options_.node_limit != 0 && result_.nodes >= options_.node_limit)) {
                open.push(std::move(node));
                complete = false;
                break;
            }

            const double f = node.relaxation.w.dot(in_.unlabeled_x.row(branch)) + node.relaxation.b;
            const signed char preferred = f >= 0.0 ? 1 : -1;
            for (const signed char label : {preferred, static_cast<signed char>(-preferred)}) {
                Node child;
                child.d = node.d;
                child.d[static_cast<std::size_t>(branch)] = label;
                child.relaxation = relax(child.d);
                child.sequence = sequence++;
                ++result_.nodes;
                consider(child);
                if (!prunable(child.relaxation.value)) open.push(std::move(child));
            }
        }

        result_.optimal = complete;
        result_.lower_bound = result_.objective;
        if (!complete) {
            double bound = result_.objective;
            while (!open.empty()) {
                bound = std::min(bound, open.top().relaxation.value);
                open.pop();
            }
            result_.lower_bound = bound;
        }
        return std::move(result_);
    }

private:
    bool prunable(double bound) const {
        if (!have_incumbent_) return false;
        return bound >= result_.objective - options_.relative_gap * std::max(1.0, std::abs(result_.objective));
    }

    // Undecided entity with the largest completion cost; -1 if all are free.
    Index branching_index(const Node& node) const {
        Index best = -1;
        double best_cost = 0.0;
        for (std::size_t u = 0; u < node.d.size(); ++u) {
            if (node.d[u] != 0) continue;
            const auto ui = static_cast<Index>(u);
            const double f = node.relaxation.w.dot(in_.unlabeled_x.row(ui)) + node.relaxation.b;
            const double cost = in_.unlabeled_cost[ui] * std::max(0.0, 1.0 - std::abs(f));
            if (cost > best_cost) {
                best_cost = cost;
                best = ui;
            }
        }
        return best;
    }

    void offer(const Vector& w, double b) {
        const double value = s3vm_objective(in_, w, b);
        if (!have_incumbent_ || value < result_.objective) {
            have_incumbent_ = true;
            result_.objective = value;
            result_.w = w;
            result_.b = b;
        }
    }

    // Completes the node's hyperplane with sign labels and, if promising,
    // re-optimizes the hyperplane for those labels.
    void consider(const Node& node) {
        const double before = have_incumbent_ ? result_.objective : std::numeric_limits<double>::infinity();
        offer(node.relaxation.w, node.relaxation.b);
        const bool undecided = std::any_of(node.d.begin(), node.d.end(), [](signed char v) { return v == 0; });
        if (!undecided || result_.objective >= before) return;
        std::vector<signed char> full = node.d;
        for (std::size_t u = 0; u < full.size(); ++u) {
            if (full[u] != 0) continue;
            const double f = node.relaxation.w.dot(in_.unlabeled_x.row(static_cast<Index>(u))) + node.relaxation.b;
            full[u] = f >= 0.0 ? 1 : -1;
        }
        const Relaxation polished = relax(full);
        offer(polished.w, polished.b);
    }

    const S3vmBnbInstance& in_;
    const S3vmBnbOptions& options_;
    S3vmBnbResult result_;
    bool have_incumbent_ = false;
};

void validate(const S3vmBnbInstance& in) {
    const Index l = in.labeled_x.rows();
    const Index m = in.labeled_x.cols();
    if (in.labeled_y.size() != l || in.labeled_cost.size() != l) {
        throw std::invalid_argument("labeled dimensions disagree");
    }
    if (in.unlabeled_x.rows() != in.unlabeled_cost.size() || (in.unlabeled_x.rows() > 0 && in.unlabeled_x.cols() != m)) {
        throw std::invalid_argument("unlabeled dimensions disagree");
    }
    if (in.balance && in.balance->center.size() != m) throw std::invalid_argument("balance center has wrong size");
    const bool positive = (in.labeled_y.array() == 1.0).any();
    const bool negative = (in.labeled_y.array() == -1.0).any();
    if (!in.balance && !(positive && negative)) {
        throw std::invalid_argument("semi-supervised instance needs labeled entities of both classes");
    }
}

}  // namespace

double s3vm_objective(const S3vmBnbInstance& in, const Vector& w, double b) {
    long double total = 0.5L * w.squaredNorm();
    for (Index k = 0; k < in.labeled_x.rows(); ++k) {
        const double f = in.labeled_x.row(k).dot(w) + b;
        total += static_cast<long double>(in.labeled_cost[k]) * std::max(0.0, 1.0 - in.labeled_y[k] * f);
    }
    for (Index u = 0; u < in.unlabeled_x.rows(); ++u) {
        const double f = in.unlabeled_x.row(u).dot(w) + b;
        total += static_cast<long double>(in.unlabeled_cost[u]) * std::max(0.0, 1.0 - std::abs(f));
    }
    return static_cast<double>(total);
}

S3vmBnbResult solve_s3vm_bnb(const S3vmBnbInstance& instance, const S3vmBnbOptions& options) {
    validate(instance);
    Search search(instance, options);
    S3vmBnbResult result = search.run();
    result.d.resize(static_cast<std::size_t>(instance.unlabeled_x.rows()));
    for (Index u = 0; u < instance.unlabeled_x.rows(); ++u) {
        const double f = instance.unlabeled_x.row(u).dot(result.w) + result.b;
        result.d[static_cast<std::size_t>(u)] = f >= 0.0 ? 1 : -1;
    }
    return result;
}

}  // namespace aid
