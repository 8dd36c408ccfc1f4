#ifndef UNIPOS_TESTS_TEST_UTIL_H_
#define UNIPOS_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "unipos/error.h"

// Checks that `expr` throws unipos::Error of the given kind.
#define CHECK_ERROR_KIND(expr, error_kind)                  \
  do {                                                      \
    bool thrown_ = false;                                   \
    try {                                                   \
      (void)(expr);                                         \
    } catch (const ::unipos::Error &e) {                    \
      thrown_ = true;                                       \
      CHECK_MESSAGE(e.kind() == (error_kind), std::string(e.what())); \
    }                                                       \
    CHECK_MESSAGE(thrown_, "expected an error from " #expr); \
  } while (false)

namespace unipos::testing {

inline std::filesystem::path DataPath(const std::string &relative) {
  return std::filesystem::path(UNIPOS_DATA_DIR) / relative;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("unipos-test-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  std::filesystem::path Write(const std::string &name, const std::string &content) const {
    std::ofstream(path_ / name, std::ios::binary) << content;
    return path_ / name;
  }
  std::string Read(const std::string &name) const {
    std::ifstream in(path_ / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace unipos::testing

#endif  // UNIPOS_TESTS_TEST_UTIL_H_
