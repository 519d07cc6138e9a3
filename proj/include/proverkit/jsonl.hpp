#pragma once

// Line-delimited JSON helpers. Readers reject malformed lines with a
// path:line diagnostic instead of skipping them; writers flush per line so
// journals survive a crash mid-run.

#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace proverkit::jsonl {

// Parses every non-blank line. Throws std::runtime_error on unreadable
// files and on lines that are not valid JSON.
std::vector<nlohmann::json> read_file(const std::string& path);

class Writer {
 public:
  // truncate=false appends, which is what journals want.
  explicit Writer(const std::string& path, bool truncate = false);

  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void write(const nlohmann::json& record);
  void write_line(const std::string& line);  // pre-serialized record
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mutex_;
  std::ofstream stream_;
};

}  // namespace proverkit::jsonl
