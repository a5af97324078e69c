#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "regdiag/dataset.hpp"

namespace regdiag {

/// Reads an RFC-4180 style CSV with a header row. The empty string is the only
/// null marker. Each column's kind is inferred from its distinct tokens:
///   tokens within {0, 1, true, false} -> binary
///   every token a finite number         -> numeric
///   anything else                       -> categorical
/// Throws ParseError on ragged rows, duplicate or missing headers, or an
/// unterminated quote.
Dataset load_dataset(std::string_view text, std::string name);
Dataset load_dataset(std::istream& source, std::string name);
Dataset load_dataset_file(const std::filesystem::path& path);

/// Writes a dataset so that `load_dataset` reproduces it. Numeric values that
/// would read back as binary tokens ("0", "1") are written as "0.0" / "1.0".
void write_csv(const Dataset& dataset, std::ostream& out);
std::string to_csv(const Dataset& dataset);

}  // namespace regdiag
