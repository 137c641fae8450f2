#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aid/linalg.hpp"

namespace aid {

/// What the response column means.
enum class TaskKind {
    regression,       ///< real-valued response
    classification,   ///< labels in {-1, +1}
    semi_supervised,  ///< labels in {-1, +1}, 0 marks an unlabeled entry
};

/// Immutable-by-convention numeric data: one row of `x` per entry, `y` holds
/// the response or label (0 = unlabeled for semi-supervised data).
struct Dataset {
    RowMatrix x;
    Vector y;
    std::vector<std::string> feature_names;
    std::string response_name = "y";
    bool has_intercept = false;

    std::size_t n() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t m() const noexcept { return static_cast<std::size_t>(x.cols()); }

    /// Throws DataError on non-finite values, size mismatch or labels that
    /// are invalid for `kind`.
    void validate(TaskKind kind) const;

    std::vector<std::size_t> indices_with_label(double label) const;
    std::vector<std::size_t> labeled_indices() const;
    std::vector<std::size_t> unlabeled_indices() const;
};

/// Copy of `data` with an all-ones column appended (no-op if already present).
Dataset with_intercept(const Dataset& data);

/// Rows of `data.x` selected by `rows`, with matching responses.
Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows);

}  // namespace aid
