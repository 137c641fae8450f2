#include "aid/dataset.hpp"

#include <cmath>

#include "aid/error.hpp"

namespace aid {

void Dataset::validate(TaskKind kind) const {
    if (y.size() != x.rows()) {
        throw DataError("response has " + std::to_string(y.size()) + " values for " +
                        std::to_string(x.rows()) + " rows");
    }
    if (!feature_names.empty() && feature_names.size() != m()) {
        throw DataError("feature name count does not match column count");
    }
    if (!x.allFinite()) throw DataError("feature matrix contains non-finite values");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double v = y[i];
        if (!std::isfinite(v)) throw DataError("response " + std::to_string(i) + " is not finite");
        switch (kind) {
            case TaskKind::regression:
                break;
            case TaskKind::classification:
                if (v != 1.0 && v != -1.0) {
                    throw DataError("label of entry " + std::to_string(i) + " is not -1 or +1");
                }
                break;
            case TaskKind::semi_supervised:
                if (v != 1.0 && v != -1.0 && v != 0.0) {
                    throw DataError("label of entry " + std::to_string(i) + " is not -1, +1 or unlabeled");
                }
                break;
        }
    }
}

std::vector<std::size_t> Dataset::indices_with_label(double label) const {
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] == label) out.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

std::vector<std::size_t> Dataset::labeled_indices() const {
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0) out.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

std::vector<std::size_t> Dataset::unlabeled_indices() const { return indices_with_label(0.0); }

Dataset with_intercept(const Dataset& data) {
    if (data.has_intercept) return data;
    Dataset out;
    out.x.resize(data.x.rows(), data.x.cols() + 1);
    out.x.leftCols(data.x.cols()) = data.x;
    out.x.col(data.x.cols()).setOnes();
    out.y = data.y;
    out.feature_names = data.feature_names;
    if (!out.feature_names.empty()) out.feature_names.push_back("(intercept)");
    out.response_name = data.response_name;
    out.has_intercept = true;
    return out;
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(rows[r]);
        out.x.row(static_cast<Eigen::Index>(r)) = data.x.row(i);
        out.y[static_cast<Eigen::Index>(r)] = data.y[i];
    }
    out.feature_names = data.feature_names;
    out.response_name = data.response_name;
    out.has_intercept = data.has_intercept;
    return out;
}

}  // namespace aid
