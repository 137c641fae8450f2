#pragma once

#include <cstddef>
#include <cstdint>

#include "aid/clustering.hpp"
#include "aid/dataset.hpp"

namespace aid {

struct SyntheticSpec {
    ProblemKind kind = ProblemKind::lad;
    std::size_t n = 1000;
    std::size_t m = 5;
    /// LAD: Laplace noise scale. SVM/S3VM: per-coordinate standard deviation.
    double noise = 1.0;
    /// Distance between the two class means (SVM/S3VM).
    double separation = 2.0;
    /// Share of entries that keep their label (S3VM).
    double labeled_fraction = 0.1;
    std::uint64_t seed = 0;
};

/// x ~ N(0, I), beta ~ N(0, I), y = x beta + Laplace(noise). Requires n > m.
Dataset generate_lad(const SyntheticSpec& spec);

/// Labels +-1 with equal probability (both always present); x = y (s/2) u + noise,
/// with u the unit diagonal direction. Requires n >= 2.
Dataset generate_svm(const SyntheticSpec& spec);

/// generate_svm, then all but round(labeled_fraction n) labels set to 0. At
/// least one entry of each class stays labeled whenever the fraction is positive.
Dataset generate_s3vm(const SyntheticSpec& spec);

/// Dispatches on spec.kind.
Dataset generate(const SyntheticSpec& spec);

}  // namespace aid
