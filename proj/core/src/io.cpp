#include "aid/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "aid/error.hpp"

namespace aid {

namespace {

using Index = Eigen::Index;
using nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Parses a finite double; a single leading '+' is tolerated.
std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            if (!std::string(trim(cell)).empty()) throw DataError("stray quote inside a field", line_no);
            cell.clear();
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            cells.push_back(was_quoted ? cell : std::string(trim(cell)));
            cell.clear();
            was_quoted = false;
        } else if (was_quoted) {
            if (c != ' ' && c != '\t' && c != '\r') throw DataError("text after a closing quote", line_no);
        } else {
            cell += c;
        }
    }
    if (quoted) throw DataError("unterminated quoted field", line_no);
    cells.push_back(was_quoted ? cell : std::string(trim(cell)));
    return cells;
}

bool blank(const std::string& line) { return trim(line).empty(); }

double parse_label(std::string_view cell, TaskKind kind, std::size_t line_no) {
    if (cell.empty()) {
        if (kind == TaskKind::semi_supervised) return 0.0;
        throw DataError("missing label", line_no);
    }
    const auto value = parse_number(cell);
    if (!value) throw DataError("label '" + std::string(cell) + "' is not a number", line_no);
    if (kind == TaskKind::regression) return *value;
    if (*value != 1.0 && *value != -1.0) {
        throw DataError("label '" + std::string(cell) + "' must be -1 or +1", line_no);
    }
    return *value;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path + "'");
    return out;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n ") == std::string::npos && !s.empty()) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static constexpr char digits[] = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xF];
        h >>= 4;
    }
    return std::string(buf, 16);
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        header = split_csv_line(line, line_no);
        break;
    }
    if (header.empty()) throw DataError("file is empty; a header row is required", line_no == 0 ? 1 : line_no);
    const std::size_t header_line = line_no;
    for (const auto& name : header) {
        if (name.empty()) throw DataError("header has an empty column name", header_line);
        if (parse_number(name)) {
            throw DataError("first row looks numeric; a header row naming the columns is required", header_line);
        }
    }
    std::size_t label = header.size() - 1;
    if (!options.label_column.empty()) {
        label = header.size();
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == options.label_column) label = c;
        }
        if (label == header.size()) {
            throw DataError("label column '" + options.label_column + "' not found in header", header_line);
        }
    }
    if (header.size() < 2) throw DataError("need at least one feature column and a label column", header_line);

    Dataset data;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == label) {
            data.response_name = header[c];
        } else {
            data.feature_names.push_back(header[c]);
        }
    }
    const std::size_t m = header.size() - 1;
    std::vector<double> values;
    std::vector<double> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto cells = split_csv_line(line, line_no);
        if (cells.size() != header.size()) {
            throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(cells.size()),
                            line_no);
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label) {
                labels.push_back(parse_label(cells[c], options.kind, line_no));
                continue;
            }
            const auto v = parse_number(cells[c]);
            if (!v) {
                throw DataError("column '" + header[c] + "': '" + cells[c] + "' is not a finite number", line_no);
            }
            values.push_back(*v);
        }
    }
    const auto n = static_cast<Index>(labels.size());
    data.x = Eigen::Map<RowMatrix>(values.data(), n, static_cast<Index>(m));
    data.y = Eigen::Map<Vector>(labels.data(), n);
    for (std::size_t c = 0; c < data.feature_names.size(); ++c) {
        if (data.feature_names[c] == "(intercept)") data.has_intercept = c + 1 == data.feature_names.size();
    }
    return data;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    auto in = open_input(path);
    return read_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data, TaskKind kind) {
    for (std::size_t c = 0; c < data.m(); ++c) {
        out << quote_if_needed(c < data.feature_names.size() ? data.feature_names[c] : "x" + std::to_string(c + 1))
            << ',';
    }
    out << quote_if_needed(data.response_name.empty() ? "y" : data.response_name) << '\n';
    for (Index i = 0; i < data.x.rows(); ++i) {
        for (Index c = 0; c < data.x.cols(); ++c) out << format_double(data.x(i, c)) << ',';
        if (!(kind == TaskKind::semi_supervised && data.y(i) == 0.0)) out << format_double(data.y(i));
        out << '\n';
    }
}

void save_csv(const std::string& path, const Dataset& data, TaskKind kind) {
    auto out = open_output(path);
    write_csv(out, data, kind);
    if (!out) throw DataError("write to '" + path + "' failed");
}

Dataset read_svmlight(std::istream& in, const SvmlightOptions& options) {
    struct Row {
        double label;
        std::vector<std::pair<std::size_t, double>> entries;
    };
    std::vector<Row> rows;
    std::size_t max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        std::istringstream tokens{std::string(view)};
        std::string token;
        if (!(tokens >> token)) continue;

        Row row;
        if (options.kind == TaskKind::semi_supervised && parse_number(token) == 0.0) {
            row.label = 0.0;
        } else {
            const TaskKind label_kind =
                options.kind == TaskKind::semi_supervised ? TaskKind::classification : options.kind;
            if (token.find(':') != std::string::npos) throw DataError("line starts with a feature, not a label", line_no);
            row.label = parse_label(token, label_kind, line_no);
        }
        std::size_t previous = 0;
        while (tokens >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == token.size()) {
                throw DataError("malformed feature '" + token + "'; expected index:value", line_no);
            }
            std::size_t index = 0;
            const auto [ptr, ec] = std::from_chars(token.data(), token.data() + colon, index);
            if (ec != std::errc{} || ptr != token.data() + colon) {
                throw DataError("feature index '" + token.substr(0, colon) + "' is not a positive integer", line_no);
            }
            if (index == 0) throw DataError("feature indices are 1-based; found index 0", line_no);
            if (index <= previous) {
                throw DataError("feature index " + std::to_string(index) + " does not increase after " +
                                    std::to_string(previous),
                                line_no);
            }
            const auto value = parse_number(std::string_view(token).substr(colon + 1));
            if (!value) throw DataError("feature value '" + token.substr(colon + 1) + "' is not a finite number", line_no);
            row.entries.emplace_back(index, *value);
            previous = index;
        }
        max_index = std::max(max_index, previous);
        rows.push_back(std::move(row));
    }
    std::size_t m = max_index;
    if (options.columns) {
        if (*options.columns < max_index) {
            throw DataError("feature index " + std::to_string(max_index) + " exceeds the declared " +
                            std::to_string(*options.columns) + " columns");
        }
        m = *options.columns;
    }
    Dataset data;
    data.x = RowMatrix::Zero(static_cast<Index>(rows.size()), static_cast<Index>(m));
    data.y.resize(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        data.y(static_cast<Index>(r)) = rows[r].label;
        for (const auto& [index, value] : rows[r].entries) {
            data.x(static_cast<Index>(r), static_cast<Index>(index - 1)) = value;
        }
    }
    return data;
}

Dataset load_svmlight(const std::string& path, const SvmlightOptions& options) {
    auto in = open_input(path);
    return read_svmlight(in, options);
}

void write_svmlight(std::ostream& out, const Dataset& data) {
    for (Index i = 0; i < data.x.rows(); ++i) {
        out << format_double(data.y(i));
        for (Index c = 0; c < data.x.cols(); ++c) {
            if (data.x(i, c) != 0.0) out << ' ' << (c + 1) << ':' << format_double(data.x(i, c));
        }
        out << '\n';
    }
}

void save_svmlight(const std::string& path, const Dataset& data) {
    auto out = open_output(path);
    write_svmlight(out, data);
    if (!out) throw DataError("write to '" + path + "' failed");
}

std::string_view model_kind(const AnyModel& model) {
    switch (model.index()) {
        case 0:
            return "lad";
        case 1:
            return "svm";
        default:
            return "s3vm";
    }
}

namespace {

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

const json& field(const json& j, const char* name) {
    if (!j.contains(name)) throw DataError(std::string("model file lacks field '") + name + "'");
    return j.at(name);
}

}  // namespace

std::string model_to_json(const ModelFile& file) {
    json doc;
    doc["format"] = "aid-model";
    doc["version"] = 1;
    doc["kind"] = std::string(model_kind(file.model));
    doc["parameters"] = file.parameters;
    doc["metadata"] = {{"seed", file.seed}, {"config_digest", file.config_digest}};
    json model;
    std::size_t dimensions = 0;
    if (const auto* lad = std::get_if<lad::LadModel>(&file.model)) {
        model["beta"] = vector_json(lad->beta);
        dimensions = static_cast<std::size_t>(lad->beta.size());
    } else if (const auto* svm = std::get_if<svm::SvmModel>(&file.model)) {
        model["kernel"] = svm->kernel.to_string();
        model["w"] = vector_json(svm->w);
        model["b"] = svm->b;
        json support = json::array();
        for (Index r = 0; r < svm->support.rows(); ++r) support.push_back(vector_json(svm->support.row(r)));
        model["support"] = std::move(support);
        model["coef"] = vector_json(svm->coef);
        dimensions = static_cast<std::size_t>(svm->kernel.is_linear() ? svm->w.size() : svm->support.cols());
    } else {
        const auto& s3vm = std::get<s3vm::S3vmModel>(file.model);
        model["w"] = vector_json(s3vm.w);
        model["b"] = s3vm.b;
        model["d"] = s3vm.d;
        dimensions = static_cast<std::size_t>(s3vm.w.size());
    }
    doc["dimensions"] = dimensions;
    doc["model"] = std::move(model);
    return doc.dump(2) + "\n";
}

ModelFile model_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (field(doc, "format").get<std::string>() != "aid-model") throw DataError("not an aid model file");
        ModelFile file;
        file.parameters = field(doc, "parameters").get<std::map<std::string, std::string>>();
        const json& meta = field(doc, "metadata");
        file.seed = field(meta, "seed").get<std::uint64_t>();
        file.config_digest = field(meta, "config_digest").get<std::string>();
        const auto kind = field(doc, "kind").get<std::string>();
        const auto dimensions = field(doc, "dimensions").get<std::size_t>();
        const json& model = field(doc, "model");
        std::size_t seen = 0;
        if (kind == "lad") {
            lad::LadModel lad{vector_from(field(model, "beta"))};
            seen = static_cast<std::size_t>(lad.beta.size());
            file.model = std::move(lad);
        } else if (kind == "svm") {
            svm::SvmModel svm;
            svm.kernel = Kernel::parse(field(model, "kernel").get<std::string>());
            svm.w = vector_from(field(model, "w"));
            svm.b = field(model, "b").get<double>();
            const json& support = field(model, "support");
            svm.coef = vector_from(field(model, "coef"));
            if (support.size() != static_cast<std::size_t>(svm.coef.size())) {
                throw DataError("support rows and coefficients differ in number");
            }
            const std::size_t cols = support.empty() && svm.kernel.is_linear() ? 0 : dimensions;
            svm.support.resize(static_cast<Index>(support.size()), static_cast<Index>(cols));
            for (std::size_t r = 0; r < support.size(); ++r) {
                const Vector row = vector_from(support[r]);
                if (static_cast<std::size_t>(row.size()) != cols) throw DataError("support row has wrong length");
                svm.support.row(static_cast<Index>(r)) = row.transpose();
            }
            seen = static_cast<std::size_t>(svm.kernel.is_linear() ? svm.w.size() : svm.support.cols());
            file.model = std::move(svm);
        } else if (kind == "s3vm") {
            s3vm::S3vmModel s3vm;
            s3vm.w = vector_from(field(model, "w"));
            s3vm.b = field(model, "b").get<double>();
            s3vm.d = field(model, "d").get<std::vector<int>>();
            for (const int v : s3vm.d) {
                if (v != 1 && v != -1) throw DataError("unlabeled assignments must be -1 or +1");
            }
            seen = static_cast<std::size_t>(s3vm.w.size());
            file.model = std::move(s3vm);
        } else {
            throw DataError("unknown model kind '" + kind + "'");
        }
        if (seen != dimensions) throw DataError("model arrays do not match the declared dimensions");
        return file;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::string& path, const ModelFile& file) {
    auto out = open_output(path);
    out << model_to_json(file);
    if (!out) throw DataError("write to '" + path + "' failed");
}

ModelFile load_model(const std::string& path) {
    auto in = open_input(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace aid
