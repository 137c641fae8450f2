#pragma once

#include <cstddef>

#include "aid/linalg.hpp"

namespace aid {

struct LadSolverOptions {
    /// Relative tolerance on dual feasibility of basic rows.
    double tolerance = 1e-9;
    /// Instances with rows * columns above this go through the interior
    /// point phase before the simplex finishes them off.
    std::size_t simplex_size_limit = 1'000'000;
    bool force_interior_point = false;
    /// 0 picks a limit from the instance size.
    std::size_t max_iterations = 0;
};

struct LadSolution {
    Vector beta;
    double objective = 0.0;       ///< sum_k w_k |y_k - x_k beta|
    double dual_objective = 0.0;  ///< y^T d of the final dual point
    std::size_t rank = 0;
    std::size_t simplex_iterations = 0;
    std::size_t interior_iterations = 0;
};

/// Minimizes sum_k w_k |y_k - x_k beta| exactly.
///
/// The LP is solved by a simplex method over interpolation bases: a basis is
/// a set of `rank` rows whose residuals are pinned to zero, and each pivot
/// releases one basic row and performs an exact line search over the
/// piecewise-linear objective (long-step ratio test). Rank-deficient column
/// sets are reduced first; coefficients of dependent columns are set to 0.
/// Large instances are warm-started from a Mehrotra interior point solution.
///
/// Throws std::invalid_argument on bad dimensions or non-positive weights and
/// SolverError when the iteration limit is exhausted.
LadSolution solve_weighted_lad(const RowMatrix& x, const Vector& y, const Vector& w,
                               const LadSolverOptions& options = {});

/// Sum of w_i |y_i - x_i beta| accumulated in extended precision.
double weighted_absolute_loss(const RowMatrix& x, const Vector& y, const Vector& w, const Vector& beta);

}  // namespace aid
