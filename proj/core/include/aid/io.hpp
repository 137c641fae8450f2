#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "aid/dataset.hpp"
#include "aid/lad.hpp"
#include "aid/s3vm.hpp"
#include "aid/svm.hpp"

namespace aid {

struct CsvOptions {
    /// Column holding the response or label; empty means the last column.
    std::string label_column;
    TaskKind kind = TaskKind::regression;
};

/// Reads a comma-separated file with a header row. Double-quoted fields are
/// accepted. Classification labels must be -1 or 1 (a leading '+' is fine);
/// semi-supervised files mark unlabeled rows with an empty label cell.
/// Throws DataError with the offending line number.
Dataset read_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Writes features then the response column, numbers in shortest round-trip
/// form. Unlabeled entries (semi-supervised) get an empty label cell.
void write_csv(std::ostream& out, const Dataset& data, TaskKind kind = TaskKind::regression);
void save_csv(const std::string& path, const Dataset& data, TaskKind kind = TaskKind::regression);

struct SvmlightOptions {
    TaskKind kind = TaskKind::classification;
    /// Number of features; when unset the largest index seen is used.
    std::optional<std::size_t> columns;
};

/// Reads "label idx:val idx:val ..." lines (1-based, strictly increasing
/// indices, '#' starts a comment) into a dense dataset. Semi-supervised files
/// use label 0 for unlabeled rows. Throws DataError with the line number.
Dataset read_svmlight(std::istream& in, const SvmlightOptions& options = {});
Dataset load_svmlight(const std::string& path, const SvmlightOptions& options = {});

/// Writes the non-zero entries of each row.
void write_svmlight(std::ostream& out, const Dataset& data);
void save_svmlight(const std::string& path, const Dataset& data);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// 64-bit FNV-1a hash as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

using AnyModel = std::variant<lad::LadModel, svm::SvmModel, s3vm::S3vmModel>;

struct ModelFile {
    AnyModel model;
    /// Run settings worth keeping with the model (penalties, kernel, ...).
    std::map<std::string, std::string> parameters;
    std::uint64_t seed = 0;
    std::string config_digest;

    friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

/// "lad", "svm" or "s3vm".
std::string_view model_kind(const AnyModel& model);

/// JSON document with kind, dimensions, parameters, metadata and the model
/// arrays. Doubles round-trip exactly.
std::string model_to_json(const ModelFile& file);
/// Throws DataError on malformed documents.
ModelFile model_from_json(std::string_view text);

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

}  // namespace aid
