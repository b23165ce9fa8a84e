#include "synthetic_mushroom.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <unistd.h>

#include "gbsc/random.hpp"

namespace gbsc::testing {
namespace {

using Counts = std::vector<std::pair<char, int>>;

struct Column {
  Counts edible;
  Counts poisonous;
};

constexpr int kEdible = 4208;
constexpr int kPoisonous = 3916;

// Per-class value counts for each of the 22 attributes, in column order.
const std::array<Column, 22>& columns() {
  static const std::array<Column, 22> table = {{
      {{{'x', 1948}, {'f', 1596}, {'b', 404}, {'k', 228}, {'s', 32}},
       {{'x', 1708}, {'f', 1556}, {'k', 600}, {'b', 48}, {'c', 4}}},
      {{{'f', 1560}, {'y', 1504}, {'s', 1144}},
       {{'y', 1740}, {'s', 1412}, {'f', 760}, {'g', 4}}},
      {{{'n', 1264}, {'g', 1032}, {'w', 720}, {'e', 624}, {'y', 400}, {'p', 56}, {'b', 48}, {'c', 32}, {'u', 16}, {'r', 16}},
       {{'n', 1020}, {'e', 876}, {'g', 808}, {'y', 672}, {'w', 320}, {'b', 120}, {'p', 88}, {'c', 12}}},
      {{{'t', 3184}, {'f', 1024}},
       {{'f', 3292}, {'t', 624}}},
      {{{'n', 3408}, {'a', 400}, {'l', 400}},
       {{'f', 2160}, {'y', 576}, {'s', 576}, {'p', 256}, {'c', 192}, {'n', 120}, {'m', 36}}},
      {{{'f', 4016}, {'a', 192}},
       {{'f', 3898}, {'a', 18}}},
      {{{'c', 3008}, {'w', 1200}},
       {{'c', 3804}, {'w', 112}}},
      {{{'b', 3920}, {'n', 288}},
       {{'n', 2224}, {'b', 1692}}},
      {{{'w', 956}, {'n', 936}, {'p', 852}, {'u', 444}, {'k', 344}, {'g', 248}, {'h', 204}, {'e', 96}, {'o', 64}, {'y', 64}},
       {{'b', 1728}, {'p', 640}, {'h', 528}, {'g', 504}, {'w', 246}, {'n', 112}, {'k', 64}, {'u', 48}, {'r', 24}, {'y', 22}}},
      {{{'t', 2432}, {'e', 1776}},
       {{'t', 2160}, {'e', 1756}}},
      {{{'b', 1920}, {'e', 864}, {'?', 720}, {'c', 512}, {'r', 192}},
       {{'b', 1856}, {'?', 1760}, {'e', 256}, {'c', 44}}},
      {{{'s', 3640}, {'f', 408}, {'k', 144}, {'y', 16}},
       {{'k', 2228}, {'s', 1536}, {'f', 144}, {'y', 8}}},
      {{{'s', 3400}, {'f', 456}, {'y', 208}, {'k', 144}},
       {{'k', 2160}, {'s', 1536}, {'f', 144}, {'y', 76}}},
      {{{'w', 2752}, {'g', 576}, {'p', 576}, {'o', 192}, {'e', 96}, {'n', 16}},
       {{'w', 1712}, {'p', 1296}, {'n', 432}, {'b', 432}, {'c', 36}, {'y', 8}}},
      {{{'w', 2704}, {'g', 576}, {'p', 576}, {'o', 192}, {'e', 96}, {'n', 64}},
       {{'w', 1680}, {'p', 1296}, {'n', 448}, {'b', 432}, {'c', 36}, {'y', 24}}},
      {{{'p', 4208}},
       {{'p', 3916}}},
      {{{'w', 4016}, {'n', 96}, {'o', 96}},
       {{'w', 3908}, {'y', 8}}},
      {{{'o', 3680}, {'t', 528}},
       {{'o', 3808}, {'t', 72}, {'n', 36}}},
      {{{'p', 3152}, {'e', 1008}, {'f', 48}},
       {{'e', 1768}, {'l', 1296}, {'p', 816}, {'n', 36}}},
      {{{'n', 1744}, {'k', 1648}, {'w', 576}, {'h', 48}, {'u', 48}, {'o', 48}, {'y', 48}, {'b', 48}},
       {{'w', 1812}, {'h', 1584}, {'k', 224}, {'n', 224}, {'r', 72}}},
      {{{'v', 1192}, {'y', 1064}, {'s', 880}, {'n', 400}, {'a', 384}, {'c', 288}},
       {{'v', 2848}, {'y', 648}, {'s', 368}, {'c', 52}}},
      {{{'d', 1880}, {'g', 1408}, {'m', 256}, {'l', 240}, {'w', 192}, {'p', 136}, {'u', 96}},
       {{'d', 1268}, {'p', 1008}, {'g', 740}, {'l', 592}, {'u', 272}, {'m', 36}}},
  }};
  return table;
}

template <typename T>
void shuffle(std::vector<T>& v, RandomStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

std::vector<char> expand(const Counts& counts, int expected, RandomStream& rng) {
  std::vector<char> out;
  for (const auto& [code, n] : counts) out.insert(out.end(), static_cast<std::size_t>(n), code);
  if (static_cast<int>(out.size()) != expected) throw std::logic_error("synthetic column total mismatch");
  shuffle(out, rng);
  return out;
}

}  // namespace

std::string synthetic_mushroom_text(std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<char> labels;
  labels.insert(labels.end(), kEdible, 'e');
  labels.insert(labels.end(), kPoisonous, 'p');
  shuffle(labels, rng);

  std::vector<std::vector<char>> edible;
  std::vector<std::vector<char>> poisonous;
  for (const Column& c : columns()) {
    edible.push_back(expand(c.edible, kEdible, rng));
    poisonous.push_back(expand(c.poisonous, kPoisonous, rng));
  }

  std::string out;
  std::size_t next_edible = 0;
  std::size_t next_poisonous = 0;
  for (const char label : labels) {
    const bool is_edible = label == 'e';
    const std::size_t row = is_edible ? next_edible++ : next_poisonous++;
    out += label;
    for (std::size_t col = 0; col < columns().size(); ++col) {
      out += ',';
      out += is_edible ? edible[col][row] : poisonous[col][row];
    }
    out += '\n';
  }
  return out;
}

std::filesystem::path write_synthetic_mushroom(const std::filesystem::path& path, std::uint64_t seed) {
  const std::string text = synthetic_mushroom_text(seed);
  {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::ostringstream existing;
      existing << in.rdbuf();
      if (existing.str() == text) return path;
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Concurrent test processes may race here; each writes its own temporary.
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return path;
}

DataSource resolve_test_data(const std::filesystem::path& scratch_dir) {
  if (const char* env = std::getenv("GBSC_DATA"); env != nullptr && *env != '\0') {
    return {env, true};
  }
  return {write_synthetic_mushroom(scratch_dir / "synthetic-agaricus-lepiota.data"), false};
}

}  // namespace gbsc::testing
