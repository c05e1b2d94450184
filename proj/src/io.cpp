#include "magic/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>
#include <unistd.h>

#include "magic/errors.hpp"

namespace magic {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw ValidationError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw ValidationError("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

std::string wigner_csv(const WignerTable& w) {
  std::vector<std::string> header;
  for (int k = 1; k <= w.n(); ++k) {
    header.push_back("u" + std::to_string(k) + "a");
    header.push_back("u" + std::to_string(k) + "a'");
  }
  header.push_back("W");
  CsvWriter csv(header);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto u = PhasePoint::from_index(static_cast<std::int64_t>(i), w.q(), w.n());
    std::vector<std::string> cells;
    for (const auto& [a, ap] : u.pairs) {
      cells.push_back(std::to_string(a));
      cells.push_back(std::to_string(ap));
    }
    cells.push_back(format_double(w[i]));
    csv.row(cells);
  }
  return csv.str();
}

std::string wigner_summary_json(const WignerTable& w) {
  const auto rep = mana(w);
  nlohmann::json j;
  j["n"] = w.n();
  j["q"] = w.q().value();
  j["mana"] = rep.mana;
  j["neg_sum"] = rep.neg_sum;
  j["min_W"] = rep.min_w;
  return j.dump(2) + "\n";
}

}  // namespace magic
