#include "nbcs/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "nbcs/error.hpp"

namespace nbcs {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::size_t> parse_index(std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw DataError(fmt::format("line {}: {}", line, what));
}

int parse_label(std::string_view token, std::size_t line) {
    const auto v = parse_double(token);
    if (!v || !std::isfinite(*v) || *v != std::round(*v) || std::abs(*v) > 1e9)
        fail(line, fmt::format("label '{}' is not an integer", token));
    return static_cast<int>(*v);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

}  // namespace

ParsedDataset read_libsvm(std::istream& in, std::size_t dim) {
    struct Row {
        std::vector<std::pair<std::size_t, double>> features;
        int label = 0;
    };
    std::vector<Row> rows;
    std::optional<bool> labeled;
    std::size_t max_index = 0;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto tokens = split_ws(line);

        Row row;
        std::size_t start = 0;
        const bool has_label = tokens.front().find(':') == std::string_view::npos;
        if (labeled && *labeled != has_label) fail(line_no, "mixes labelled and unlabelled rows");
        labeled = has_label;
        if (has_label) {
            row.label = parse_label(tokens.front(), line_no);
            start = 1;
        }
        std::size_t previous = 0;
        for (std::size_t t = start; t < tokens.size(); ++t) {
            const auto colon = tokens[t].find(':');
            if (colon == std::string_view::npos) fail(line_no, fmt::format("expected index:value, got '{}'", tokens[t]));
            const auto index = parse_index(tokens[t].substr(0, colon));
            if (!index || *index == 0) fail(line_no, fmt::format("bad feature index in '{}'", tokens[t]));
            if (*index <= previous) fail(line_no, "feature indices must be strictly ascending");
            if (dim != 0 && *index > dim)
                fail(line_no, fmt::format("feature index {} exceeds dimension {}", *index, dim));
            const auto value = parse_double(tokens[t].substr(colon + 1));
            if (!value || !std::isfinite(*value)) fail(line_no, fmt::format("bad feature value in '{}'", tokens[t]));
            previous = *index;
            max_index = std::max(max_index, *index);
            row.features.emplace_back(*index - 1, *value);
        }
        rows.push_back(std::move(row));
    }
    if (in.bad()) throw DataError("read error");

    ParsedDataset out;
    out.labeled = labeled.value_or(true);
    out.data.dim = dim != 0 ? dim : max_index;
    out.data.points.reserve(rows.size());
    for (const auto& row : rows) {
        Point p = Point::Zero(static_cast<Eigen::Index>(out.data.dim));
        for (const auto& [i, v] : row.features) p[static_cast<Eigen::Index>(i)] = v;
        out.data.points.push_back(std::move(p));
        out.data.labels.push_back(row.label);
    }
    return out;
}

ParsedDataset read_libsvm_file(const std::string& path, std::size_t dim) {
    auto in = open_input(path);
    return read_libsvm(in, dim);
}

ParsedDataset read_csv(std::istream& in, bool labeled) {
    ParsedDataset out;
    out.labeled = labeled;
    std::optional<std::size_t> columns;
    std::string raw;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::size_t i = 0;
        while (true) {
            const auto comma = line.find(',', i);
            cells.push_back(trim(line.substr(i, comma == std::string_view::npos ? std::string_view::npos : comma - i)));
            if (comma == std::string_view::npos) break;
            i = comma + 1;
        }
        std::vector<double> values;
        bool numeric = true;
        for (auto c : cells) {
            const auto v = parse_double(c);
            if (!v) {
                numeric = false;
                break;
            }
            values.push_back(*v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            fail(line_no, "non-numeric cell");
        }
        first = false;
        if (columns && *columns != values.size())
            fail(line_no, fmt::format("expected {} columns, found {}", *columns, values.size()));
        columns = values.size();
        if (labeled && values.size() < 2) fail(line_no, "need a label and at least one feature");
        std::size_t offset = 0;
        int label = 0;
        if (labeled) {
            label = parse_label(cells.front(), line_no);
            offset = 1;
        }
        Point p(static_cast<Eigen::Index>(values.size() - offset));
        for (std::size_t j = offset; j < values.size(); ++j) {
            if (!std::isfinite(values[j])) fail(line_no, "non-finite feature");
            p[static_cast<Eigen::Index>(j - offset)] = values[j];
        }
        out.data.points.push_back(std::move(p));
        out.data.labels.push_back(label);
    }
    if (in.bad()) throw DataError("read error");
    out.data.dim = columns ? *columns - (labeled ? 1 : 0) : 0;
    return out;
}

ParsedDataset read_csv_file(const std::string& path, bool labeled) {
    auto in = open_input(path);
    return read_csv(in, labeled);
}

void write_libsvm(std::ostream& out, const LabeledDataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::string line = std::to_string(data.labels[i]);
        const Point& p = data.points[i];
        for (Eigen::Index j = 0; j < p.size(); ++j)
            if (p[j] != 0.0) line += fmt::format(" {}:{}", j + 1, p[j]);
        out << line << '\n';
    }
}

void write_libsvm_file(const std::string& path, const LabeledDataset& data) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_libsvm(out, data);
    if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace nbcs
