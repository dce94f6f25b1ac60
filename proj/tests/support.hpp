#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

namespace test_support {

// Fresh scratch directory per test binary.
inline std::filesystem::path scratch(const std::string& name) {
  const char* root = std::getenv("HT_TEST_TMP");
  auto dir = std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string()) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace test_support
