#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "smilerisk/config.hpp"

namespace smilerisk {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
/// Digest of a file's bytes; throws Error(IoError) if it cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Plain comma-separated table (no quoting) with a header row.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws Error(InvalidArgument) if the column is absent.
  std::size_t column(std::string_view name) const;
  /// Throws Error(UnparseableRow) naming source and line on bad cells.
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::size_t bytes = 0;
  std::string sha256;
};

FileDigest digest(const std::filesystem::path& path, const std::filesystem::path& relative_to = {});

/// Manifest JSON: command, full config, seed, input and output digests.
/// Contains no timestamps, so identical runs produce identical manifests.
std::string manifest_json(std::string_view command, const PipelineConfig& config,
                          const std::vector<FileDigest>& inputs,
                          const std::vector<FileDigest>& outputs);

}  // namespace smilerisk
