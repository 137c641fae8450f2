#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "aid/dataset.hpp"
#include "aid/linalg.hpp"

namespace testing_support {

inline aid::RowMatrix rows(std::initializer_list<std::initializer_list<double>> values) {
    aid::RowMatrix x(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : values) {
        Eigen::Index c = 0;
        for (const double v : row) x(r, c++) = v;
        ++r;
    }
    return x;
}

inline aid::Vector vec(std::initializer_list<double> values) {
    aid::Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (const double value : values) v(i++) = value;
    return v;
}

inline aid::Dataset dataset(aid::RowMatrix x, aid::Vector y) {
    aid::Dataset d;
    d.x = std::move(x);
    d.y = std::move(y);
    return d;
}

/// Gaussian matrix from std::mt19937_64; test instances only.
inline aid::RowMatrix gaussian(std::mt19937_64& gen, Eigen::Index n, Eigen::Index m) {
    std::normal_distribution<double> normal;
    aid::RowMatrix x(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) x(i, j) = normal(gen);
    return x;
}

/// Two shifted Gaussian classes, both present.
inline aid::Dataset classes(std::mt19937_64& gen, Eigen::Index n, Eigen::Index m, double shift) {
    aid::Dataset d;
    d.x = gaussian(gen, n, m);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.y(i) = i % 2 == 0 ? 1.0 : -1.0;
        d.x(i, 0) += d.y(i) * shift;
    }
    return d;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing_support
