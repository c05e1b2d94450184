#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "magic/wigner.hpp"

namespace magic {

// Shortest round-trip decimal form of a double ("%.17g"), locale independent.
std::string format_double(double x);

// Write `contents` to a temporary next to `path`, then rename over it.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

// Columns u1a, u1a', ..., una, una', W.
std::string wigner_csv(const WignerTable& w);
// {"n", "q", "mana", "neg_sum", "min_W"}
std::string wigner_summary_json(const WignerTable& w);

}  // namespace magic
