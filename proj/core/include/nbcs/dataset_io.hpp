#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "nbcs/learner.hpp"

namespace nbcs {

/// A parsed file. When `labeled` is false every label is 0.
struct ParsedDataset {
    LabeledDataset data;
    bool labeled = true;
};

/// LibSVM text: "label idx:value ..." with 1-based ascending indices, '#'
/// comments and blank lines ignored. Lines may omit the label, but a file must
/// be consistently labelled or unlabelled. `dim` fixes the dimension (0 infers
/// the largest index). Errors are DataError naming the line.
ParsedDataset read_libsvm(std::istream& in, std::size_t dim = 0);
ParsedDataset read_libsvm_file(const std::string& path, std::size_t dim = 0);

/// Comma-separated rows with the label in the first column. A first line that
/// does not parse as numbers is treated as a header. `labeled = false` reads
/// every column as a feature.
ParsedDataset read_csv(std::istream& in, bool labeled = true);
ParsedDataset read_csv_file(const std::string& path, bool labeled = true);

/// Writes LibSVM text, omitting zero features; values round-trip exactly.
void write_libsvm(std::ostream& out, const LabeledDataset& data);
void write_libsvm_file(const std::string& path, const LabeledDataset& data);

}  // namespace nbcs
