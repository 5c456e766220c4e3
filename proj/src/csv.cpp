#include "quda/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "quda/error.hpp"

namespace quda {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  }
  return out;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& label_column, bool require_label,
                  const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) parse_error(source, 1, "missing header row");
  ++lineno;
  const std::vector<std::string> header = split(line);
  std::optional<std::size_t> label_at;
  CsvTable t;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label_column && !label_at) {
      label_at = c;
    } else {
      t.features.push_back(header[c]);
    }
  }
  if (require_label && !label_at) {
    parse_error(source, 1, "label column '" + label_column + "' not found in header");
  }
  if (label_at) t.labels.emplace();

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      parse_error(source, lineno, "expected " + std::to_string(header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      if (label_at && c == *label_at) {
        int label = 0;
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), label);
        if (ec != std::errc() || ptr != f.data() + f.size() || (label != 1 && label != 2)) {
          parse_error(source, lineno, "label '" + f + "' is not 1 or 2");
        }
        t.labels->push_back(label);
        continue;
      }
      double v = 0.0;
      const char* first = f.data();
      if (!f.empty() && f[0] == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        parse_error(source, lineno, "column '" + header[c] + "': '" + f + "' is not a number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  t.x = Matrix(rows, t.features.size());
  std::copy(values.begin(), values.end(), t.x.data().begin());
  return t;
}

CsvTable read_csv(const std::filesystem::path& path, const std::string& label_column,
                  bool require_label) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return read_csv(in, label_column, require_label, path.string());
}

LabeledDataset to_dataset(const CsvTable& table) {
  if (!table.labels) throw Error(Errc::ParseError, "table has no label column");
  LabeledDataset d{table.x, *table.labels};
  d.validate();
  return d;
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_dataset_csv(const LabeledDataset& data, std::ostream& out, const std::string& label_column) {
  for (std::size_t j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (double v : data.x.row(i)) out << format_number(v) << ',';
    out << data.labels[i] << '\n';
  }
}

}  // namespace quda
