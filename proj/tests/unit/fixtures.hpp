#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aid/dataset.hpp"

namespace testing_support {

/// Malformed input files under tests/data and the line each error must cite.
struct MalformedFixture {
    std::string file;
    aid::TaskKind kind;
    std::size_t line;
};

inline const std::vector<MalformedFixture>& malformed_fixtures() {
    static const std::vector<MalformedFixture> fixtures{
        {"bad_ragged.csv", aid::TaskKind::regression, 3},
        {"bad_non_numeric.csv", aid::TaskKind::regression, 3},
        {"bad_label_plus2.csv", aid::TaskKind::classification, 4},
        {"bad_no_header.csv", aid::TaskKind::regression, 1},
        {"bad_empty.csv", aid::TaskKind::regression, 1},
        {"bad_index_zero.svm", aid::TaskKind::classification, 2},
        {"bad_non_increasing.svm", aid::TaskKind::classification, 2},
        {"bad_pair.svm", aid::TaskKind::classification, 3},
        {"bad_value.svm", aid::TaskKind::classification, 3},
        {"bad_label.svm", aid::TaskKind::classification, 2},
    };
    return fixtures;
}

inline std::string data_path(const std::string& file) { return std::string(AID_TEST_DATA_DIR) + "/" + file; }

}  // namespace testing_support
