#pragma once

#include <cstddef>
#include <optional>

#include "aid/kernel.hpp"
#include "aid/linalg.hpp"

namespace aid {

/// Weighted soft-margin SVM
///   min 1/2 |w|^2 + M sum_k weight_k xi_k
///   s.t. y_k (w.phi(x_k) + b) >= 1 - xi_k, xi_k >= 0.
///
/// Either `x` (with `kernel`) or a precomputed `gram` describes the entities;
/// when `gram` is non-empty it takes precedence and `x` may be empty.
struct SvmInstance {
    RowMatrix x;
    Matrix gram;
    Vector y;
    Vector weights;
    double penalty = 0.1;
    Kernel kernel;
    /// When set, b is fixed to this value and the dual has no equality
    /// constraint (used for the semi-supervised balance constraint).
    std::optional<double> fixed_bias;

    std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
    bool uses_gram() const noexcept { return gram.size() != 0; }
};

struct SvmSolverOptions {
    /// Stop when the maximal KKT violation m(alpha) - M(alpha) drops below this.
    double tolerance = 1e-6;
    /// 0 picks max(10^7, 100 k).
    std::size_t max_iterations = 0;
    /// Solve the free-variable KKT system after SMO for a near-exact optimum.
    bool polish = true;
    /// Dense Q is stored when it fits; otherwise columns go through an LRU cache.
    std::size_t cache_bytes = std::size_t{256} << 20;
};

struct SvmSolution {
    Vector alpha;      ///< dual variables, 0 <= alpha_k <= weight_k M
    double b = 0.0;
    Vector w;          ///< primal normal (linear kernel with features only)
    Vector decision;   ///< f(x_k) = sum_s alpha_s y_s K(x_s, x_k) + b
    Vector xi;         ///< max(0, 1 - y_k f(x_k))
    double norm_squared = 0.0;  ///< |w|^2 = alpha^T Q alpha
    double primal = 0.0;
    double dual = 0.0;
    double kkt_violation = 0.0;
    std::size_t iterations = 0;
    bool polished = false;
};

/// Solves the dual box QP by SMO with second-order working-set selection,
/// followed by an optional polishing step on the free variables.
///
/// Throws std::invalid_argument for malformed instances (including a single
/// label class without a fixed bias) and SolverError when SMO exceeds its
/// iteration limit; the error carries the best KKT violation reached.
SvmSolution solve_weighted_svm(const SvmInstance& instance, const SvmSolverOptions& options = {});

}  // namespace aid
