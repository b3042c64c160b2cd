#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kitchen/layout.hpp"

namespace kitchen {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path.string());
  out << content;
}

// Layout files store the canonical text plus an optional final newline.
inline Layout load_layout_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
    text.pop_back();
  return parse_layout(text, path.stem().string());
}

}  // namespace kitchen
