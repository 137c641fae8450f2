#include "aid/kernel.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace aid {

std::string Kernel::to_string() const {
    if (kind == KernelKind::linear) return "linear";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, gamma);
    return "rbf:" + std::string(buffer, result.ptr);
}

Kernel Kernel::parse(const std::string& text) {
    if (text == "linear") return linear();
    if (text.rfind("rbf:", 0) == 0) {
        const char* first = text.data() + 4;
        const char* last = text.data() + text.size();
        double gamma = 0.0;
        const auto result = std::from_chars(first, last, gamma);
        if (result.ec != std::errc{} || result.ptr != last || !(gamma > 0.0) || !std::isfinite(gamma)) {
            throw std::invalid_argument("invalid RBF gamma in '" + text + "'");
        }
        return rbf(gamma);
    }
    throw std::invalid_argument("unknown kernel '" + text + "' (expected linear or rbf:GAMMA)");
}

Matrix cross_gram(const RowMatrix& a, const RowMatrix& b, const Kernel& kernel) {
    Matrix out = a * b.transpose();
    if (kernel.kind == KernelKind::linear) return out;
    const Vector na = a.rowwise().squaredNorm();
    const Vector nb = b.rowwise().squaredNorm();
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const double d2 = std::max(0.0, na[i] + nb[j] - 2.0 * out(i, j));
            out(i, j) = std::exp(-kernel.gamma * d2);
        }
    }
    return out;
}

Matrix gram_matrix(const RowMatrix& x, const Kernel& kernel) {
    Matrix out = cross_gram(x, x, kernel);
    // Symmetrize exactly; the GEMM may differ in the last bit across triangles.
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < out.rows(); ++i) out(j, i) = out(i, j);
        if (kernel.kind == KernelKind::rbf) out(j, j) = 1.0;
    }
    return out;
}

}  // namespace aid
