#pragma once

// Numeric CSV with a required header row. Decimal parsing and printing are
// locale-independent (std::from_chars / std::to_chars).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quda/moments.hpp"

namespace quda {

struct CsvTable {
  std::vector<std::string> features;  ///< feature column names, in order
  Matrix x;
  /// Present when the label column was found.
  std::optional<std::vector<int>> labels;
};

/// Reads every column except `label_column` as a feature. When
/// `require_label` is set, a missing label column is a ParseError naming it.
CsvTable read_csv(std::istream& in, const std::string& label_column, bool require_label,
                  const std::string& source = "<stream>");
CsvTable read_csv(const std::filesystem::path& path, const std::string& label_column,
                  bool require_label);

LabeledDataset to_dataset(const CsvTable& table);

/// Shortest round-trip decimal form.
std::string format_number(double v);

void write_dataset_csv(const LabeledDataset& data, std::ostream& out,
                       const std::string& label_column = "label");

}  // namespace quda
