#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace gbsc::testing {

// Stand-in for agaricus-lepiota.data when the canonical file is unavailable.
//
// 8124 records in the same format and attribute alphabets, 4208 edible and
// 3916 poisonous, with '?' only in stalk-root (2480 records). Each column is
// a shuffled multiset whose per-class value counts follow the published
// per-class attribute marginals; columns are independent given the class,
// so cross-attribute structure of the real data is not reproduced.
std::string synthetic_mushroom_text(std::uint64_t seed = 2020);

// Writes the text above to `path` unless it already exists with the same
// content. Returns `path`.
std::filesystem::path write_synthetic_mushroom(const std::filesystem::path& path, std::uint64_t seed = 2020);

// $GBSC_DATA when set, otherwise a synthetic file under `scratch_dir`.
struct DataSource {
  std::filesystem::path path;
  bool canonical = false;
};
DataSource resolve_test_data(const std::filesystem::path& scratch_dir);

}  // namespace gbsc::testing
