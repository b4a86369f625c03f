#pragma once

#include <filesystem>
#include <string>

#ifndef POLICYFLOW_REPO_DIR
#error "POLICYFLOW_REPO_DIR must be defined by the build"
#endif

namespace testsupport {

inline std::filesystem::path repo_dir() { return std::filesystem::path(POLICYFLOW_REPO_DIR); }

inline std::filesystem::path fixture_dir() { return repo_dir() / "tests" / "fixtures"; }

inline std::filesystem::path data_dir() { return repo_dir() / "data"; }

// Fresh per-process scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  std::filesystem::path dir = std::filesystem::temp_directory_path() /
                              ("policyflow_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string escape_html_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') {
      out += "&amp;";
    } else if (c == '<') {
      out += "&lt;";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace testsupport
