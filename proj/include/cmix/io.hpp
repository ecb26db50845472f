#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace cmix {

/// Output file that only appears at its final path after commit().
///
/// Content goes to a sibling temp file which is renamed over the target on
/// commit; an uncommitted file is removed on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);

/// Drops INI comments that follow a value ("key = 4  ; note"): a ';' or '#'
/// preceded by a space or tab ends the line. Line numbering is kept.
std::string strip_inline_comments(std::string_view ini);

}  // namespace cmix
