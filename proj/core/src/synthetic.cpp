#include "aid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aid/error.hpp"
#include "aid/rng.hpp"

namespace aid {

namespace {

using Index = Eigen::Index;

// Stream ids keep the draws for features, coefficients, noise and masks
// independent of each other, so changing n does not reshuffle beta.
constexpr std::uint64_t kFeatureStream = 10;
constexpr std::uint64_t kCoefficientStream = 11;
constexpr std::uint64_t kNoiseStream = 12;
constexpr std::uint64_t kLabelStream = 13;
constexpr std::uint64_t kMaskStream = 14;

void name_columns(Dataset& data) {
    data.feature_names.clear();
    for (std::size_t c = 0; c < data.m(); ++c) data.feature_names.push_back("x" + std::to_string(c + 1));
    data.response_name = "y";
}

}  // namespace

Dataset generate_lad(const SyntheticSpec& spec) {
    if (spec.m == 0 || spec.n <= spec.m) throw ConfigError("LAD instances need n > m >= 1");
    if (!(spec.noise >= 0.0)) throw ConfigError("noise scale must be non-negative");
    const auto n = static_cast<Index>(spec.n);
    const auto m = static_cast<Index>(spec.m);
    CounterRng features(spec.seed, kFeatureStream);
    CounterRng coefficients(spec.seed, kCoefficientStream);
    CounterRng noise(spec.seed, kNoiseStream);

    Vector beta(m);
    for (Index j = 0; j < m; ++j) beta(j) = coefficients.normal();
    Dataset data;
    data.x.resize(n, m);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < m; ++j) data.x(i, j) = features.normal();
    }
    data.y = data.x * beta;
    if (spec.noise > 0.0) {
        for (Index i = 0; i < n; ++i) data.y(i) += noise.laplace(spec.noise);
    }
    name_columns(data);
    return data;
}

Dataset generate_svm(const SyntheticSpec& spec) {
    if (spec.n < 2 || spec.m == 0) throw ConfigError("SVM instances need n >= 2 and m >= 1");
    if (!(spec.noise >= 0.0) || !(spec.separation >= 0.0)) {
        throw ConfigError("noise and separation must be non-negative");
    }
    const auto n = static_cast<Index>(spec.n);
    const auto m = static_cast<Index>(spec.m);
    CounterRng labels(spec.seed, kLabelStream);
    CounterRng features(spec.seed, kFeatureStream);

    Dataset data;
    data.y.resize(n);
    for (Index i = 0; i < n; ++i) data.y(i) = labels.uniform() < 0.5 ? 1.0 : -1.0;
    // A single-class draw is only possible for tiny n; force the last label.
    if ((data.y.array() == data.y(0)).all()) data.y(n - 1) = -data.y(0);

    const double offset = 0.5 * spec.separation / std::sqrt(static_cast<double>(m));
    data.x.resize(n, m);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < m; ++j) data.x(i, j) = data.y(i) * offset + spec.noise * features.normal();
    }
    name_columns(data);
    return data;
}

Dataset generate_s3vm(const SyntheticSpec& spec) {
    if (!(spec.labeled_fraction >= 0.0 && spec.labeled_fraction <= 1.0)) {
        throw ConfigError("labeled fraction must be in [0, 1]");
    }
    Dataset data = generate_svm(spec);
    const std::size_t n = data.n();
    auto keep = static_cast<std::size_t>(std::llround(spec.labeled_fraction * static_cast<double>(n)));
    if (spec.labeled_fraction > 0.0) keep = std::max<std::size_t>(keep, 2);
    keep = std::min(keep, n);
    if (keep == n) return data;

    CounterRng mask(spec.seed, kMaskStream);
    auto labeled = sample_indices(n, keep, mask);
    if (keep >= 2) {
        // Make sure each class keeps a labeled representative.
        for (const double label : {1.0, -1.0}) {
            const bool present = std::any_of(labeled.begin(), labeled.end(),
                                             [&](std::size_t i) { return data.y(static_cast<Index>(i)) == label; });
            if (present) continue;
            for (std::size_t i = 0; i < n; ++i) {
                if (data.y(static_cast<Index>(i)) != label) continue;
                // Replace an entry of the over-represented class.
                auto victim = std::find_if(labeled.rbegin(), labeled.rend(), [&](std::size_t r) {
                    return data.y(static_cast<Index>(r)) == -label;
                });
                *victim = i;
                std::sort(labeled.begin(), labeled.end());
                break;
            }
        }
    }
    std::vector<bool> is_labeled(n, false);
    for (const std::size_t i : labeled) is_labeled[i] = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_labeled[i]) data.y(static_cast<Index>(i)) = 0.0;
    }
    return data;
}

Dataset generate(const SyntheticSpec& spec) {
    switch (spec.kind) {
        case ProblemKind::lad:
            return generate_lad(spec);
        case ProblemKind::svm:
            return generate_svm(spec);
        case ProblemKind::s3vm:
            return generate_s3vm(spec);
    }
    throw ConfigError("unknown problem kind");
}

}  // namespace aid
