#include "proverkit/jsonl.hpp"

#include <stdexcept>

namespace proverkit::jsonl {

std::vector<nlohmann::json> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": invalid JSON line");
    out.push_back(std::move(j));
  }
  return out;
}

Writer::Writer(const std::string& path, bool truncate)
    : path_(path),
      stream_(path, truncate ? std::ios::trunc : std::ios::app) {
  if (!stream_) throw std::runtime_error("cannot open " + path + " for writing");
}

void Writer::write(const nlohmann::json& record) { write_line(record.dump()); }

void Writer::write_line(const std::string& line) {
  std::lock_guard lk(mutex_);
  stream_ << line << '\n';
  stream_.flush();
  if (!stream_) throw std::runtime_error("write failed on " + path_);
}

}  // namespace proverkit::jsonl
