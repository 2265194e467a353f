#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef COMPRAG_FIXTURE_DIR
#error "COMPRAG_FIXTURE_DIR must be defined by the build"
#endif

namespace comprag::test {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(COMPRAG_FIXTURE_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open fixture: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace comprag::test
