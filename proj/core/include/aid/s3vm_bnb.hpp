#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "aid/linalg.hpp"
#include "aid/svm_qp.hpp"

namespace aid {

/// Linear equality w.center + b = target imposed on every subproblem.
struct BalanceTarget {
    Vector center;
    double target = 0.0;
};

/// Semi-supervised SVM with per-entity slack costs:
///   min 1/2 |w|^2 + sum_k cl_k xi_k + sum_u cu_u xi_u
///   s.t. y_k (w x_k + b) >= 1 - xi_k,  d_u (w x_u + b) >= 1 - xi_u,
///        d_u in {-1, +1}, xi >= 0.
struct S3vmBnbInstance {
    RowMatrix labeled_x;
    Vector labeled_y;
    Vector labeled_cost;
    RowMatrix unlabeled_x;
    Vector unlabeled_cost;
    std::optional<BalanceTarget> balance;
};

struct S3vmBnbOptions {
    double time_limit = std::numeric_limits<double>::infinity();  ///< seconds
    std::size_t node_limit = 0;  ///< 0 = unlimited
    /// Nodes whose bound is within this relative distance of the incumbent are pruned.
    double relative_gap = 1e-10;
    SvmSolverOptions svm;
};

struct S3vmBnbResult {
    Vector w;
    double b = 0.0;
    std::vector<int> d;  ///< label per unlabeled entity
    double objective = 0.0;
    double lower_bound = 0.0;
    bool optimal = false;
    std::size_t nodes = 0;
};

/// Branch and bound over the unlabeled labels d. A node fixes some labels;
/// its bound is the convex weighted SVM over the labeled and decided entities
/// (undecided slack terms dropped). Completing a node's hyperplane with the
/// error-minimizing labels d_u = sign(w x_u + b) gives an incumbent candidate.
/// Nodes are explored best-bound first. Linear kernel only.
///
/// Throws std::invalid_argument if a labeled class is missing and no balance
/// target fixes the bias.
S3vmBnbResult solve_s3vm_bnb(const S3vmBnbInstance& instance, const S3vmBnbOptions& options = {});

/// Objective of a fixed hyperplane with error-minimizing unlabeled labels.
double s3vm_objective(const S3vmBnbInstance& instance, const Vector& w, double b);

}  // namespace aid
