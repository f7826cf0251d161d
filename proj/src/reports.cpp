#include "smilerisk/reports.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"

namespace smilerisk {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::IoError, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(slurp(path)); }

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::IoError, "cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(Errc::InvalidArgument, source + ": no column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  double v = 0.0;
  if (!parse_number(rows.at(row).at(col), v)) {
    throw Error(Errc::UnparseableRow, source + ":" + std::to_string(row + 2) + ": column '" +
                                          header.at(col) + "' is not a number");
  }
  return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  CsvTable t;
  t.source = path.string();
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw Error(Errc::UnparseableRow, t.source + ":" + std::to_string(lineno) + ": expected " +
                                            std::to_string(t.header.size()) + " cells, got " +
                                            std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw Error(Errc::UnparseableRow, t.source + ": empty file");
  return t;
}

FileDigest digest(const std::filesystem::path& path, const std::filesystem::path& relative_to) {
  const std::string data = slurp(path);
  FileDigest d;
  d.path = relative_to.empty() ? path.generic_string()
                               : path.lexically_relative(relative_to).generic_string();
  d.bytes = data.size();
  d.sha256 = sha256_hex(data);
  return d;
}

std::string manifest_json(std::string_view command, const PipelineConfig& config,
                          const std::vector<FileDigest>& inputs,
                          const std::vector<FileDigest>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = config.synth.seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : to_key_values(config)) cfg[k] = v;
  j["config"] = cfg;
  auto files = [](const std::vector<FileDigest>& list) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& f : list) arr.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    return arr;
  };
  j["inputs"] = files(inputs);
  j["outputs"] = files(outputs);
  return j.dump(2) + "\n";
}

}  // namespace smilerisk
