#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kitchen/layout.hpp"

namespace kitchen {

// Append-only JSON-lines run log, one structured record per line. Schema is
// versioned via the leading meta record; wall-clock values only ever appear
// under keys ending in "_ms" so logs can be compared net of timing.
class RunLogWriter {
 public:
  explicit RunLogWriter(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path())
      std::filesystem::create_directories(path_.parent_path());
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("cannot open run log: " + path_.string());
  }

  void write(const nlohmann::json& record) {
    out_ << record.dump() << '\n';
    out_.flush();
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline std::vector<nlohmann::json> read_run_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open run log: " + path.string());
  std::vector<nlohmann::json> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(nlohmann::json::parse(line));
  }
  return records;
}

inline long long wall_ms_now() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace kitchen
