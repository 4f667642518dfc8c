#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hyperteam/instance.hpp"

namespace hyperteam {

class ParseError : public InstanceError {
 public:
  using InstanceError::InstanceError;
};

enum class InstanceFormat { json, edge_list };

InstanceFormat parse_format(std::string_view name);
/// Picks the format from the file extension (.json, anything else is edge-list).
InstanceFormat guess_format(const std::filesystem::path& path);

ProblemInstance load_instance(const std::filesystem::path& path, InstanceFormat format);
ProblemInstance parse_instance_json(const nlohmann::json& doc);
/**
 * Edge-list text: one task per line, `task: a b c` or `task(E): a:2 b:1`.
 * Weights default to 1, budgets are the row sums, energies the column sums
 * unless a task carries an explicit `(E)`. Lines starting with `#` are skipped.
 */
ProblemInstance parse_edge_list(std::string_view text);

nlohmann::json instance_to_json(const ProblemInstance& inst);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// 12 significant digits, used for every floating-point CSV cell.
std::string format_double(double value);

/// Minimal CSV accumulator. Cells are written verbatim; ids never need quoting.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::vector<std::string> out;
    (out.push_back(cell(cells)), ...);
    add_row(out);
  }
  void add_row(const std::vector<std::string>& cells);

  const std::string& str() const { return buffer_; }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  template <typename Int>
    requires std::is_integral_v<Int>
  static std::string cell(Int v) {
    return std::to_string(v);
  }

  std::size_t columns_;
  std::string buffer_;
};

}  // namespace hyperteam
