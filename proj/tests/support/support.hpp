#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "tonebias/dataset.hpp"
#include "tonebias/features.hpp"

namespace tbtest {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("tonebias-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline tonebias::SparseVector dense_row(const std::vector<double>& v) {
  tonebias::SparseVector r;
  r.dim = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      r.indices.push_back(static_cast<std::uint32_t>(i));
      r.values.push_back(v[i]);
    }
  }
  return r;
}

inline tonebias::Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                                      const std::vector<int>& y) {
  tonebias::Dataset d;
  d.dim = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) d.rows.push_back(dense_row(r));
  for (int v : y) d.y.push_back(v > 0 ? tonebias::Polarity::positive : tonebias::Polarity::negative);
  return d;
}

}  // namespace tbtest
