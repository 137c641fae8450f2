#pragma once

#include <cmath>
#include <string>

#include "aid/linalg.hpp"

namespace aid {

enum class KernelKind { linear, rbf };

/// Kernel function K(a, b). Linear: a.b; RBF: exp(-gamma |a - b|^2).
struct Kernel {
    KernelKind kind = KernelKind::linear;
    double gamma = 1.0;

    static Kernel linear() { return {}; }
    static Kernel rbf(double gamma) { return {KernelKind::rbf, gamma}; }

    template <class A, class B>
    double operator()(const A& a, const B& b) const {
        if (kind == KernelKind::linear) return a.dot(b);
        return std::exp(-gamma * (a - b).squaredNorm());
    }

    bool is_linear() const noexcept { return kind == KernelKind::linear; }

    /// "linear" or "rbf:GAMMA".
    std::string to_string() const;
    /// Parses the to_string() format; throws std::invalid_argument.
    static Kernel parse(const std::string& text);

    friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// Full Gram matrix K(x_i, x_j) of the rows of `x`.
Matrix gram_matrix(const RowMatrix& x, const Kernel& kernel);

/// Cross Gram K(a_i, b_j).
Matrix cross_gram(const RowMatrix& a, const RowMatrix& b, const Kernel& kernel);

}  // namespace aid
