#pragma once

// The UCI Mushroom environment: eating a safe mushroom pays +5, eating a
// poisonous one pays +5 or -35 with equal probability, not eating pays 0.
//
// Two reference policies define regret. The legacy oracle eats exactly the
// safe mushrooms. The default oracle also eats a poisonous mushroom whenever
// the eating coin would have paid +5, scoring 0 when it would have paid -35.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gbsc/bandit.hpp"
#include "gbsc/random.hpp"

namespace gbsc {

inline constexpr std::size_t kMushroomSubsets = 22;

// Attribute names in dataset column order (columns 1..22).
inline constexpr std::array<std::string_view, kMushroomSubsets> kMushroomAttributeNames = {
    "cap-shape",         "cap-surface",           "cap-color",
    "bruises",           "odor",                  "gill-attachment",
    "gill-spacing",      "gill-size",             "gill-color",
    "stalk-shape",       "stalk-root",            "stalk-surface-above-ring",
    "stalk-surface-below-ring", "stalk-color-above-ring", "stalk-color-below-ring",
    "veil-type",         "veil-color",            "ring-number",
    "ring-type",         "spore-print-color",     "population",
    "habitat"};

// Index of stalk-root, the only attribute with missing values in the
// canonical file.
inline constexpr std::size_t kStalkRootIndex = 10;

inline constexpr double kSafeReward = 5.0;
inline constexpr double kPoisonGoodReward = 5.0;
inline constexpr double kPoisonBadReward = -35.0;
inline constexpr double kPoisonGoodProbability = 0.5;

enum class Label : std::uint8_t { Safe, Poisonous };

struct Mushroom {
  Label label = Label::Safe;
  ContextVector context;
};

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Mushroom> mushrooms);

  const std::vector<Mushroom>& mushrooms() const noexcept { return mushrooms_; }
  const Mushroom& operator[](std::size_t i) const { return mushrooms_[i]; }
  std::size_t size() const noexcept { return mushrooms_.size(); }
  bool empty() const noexcept { return mushrooms_.empty(); }

  // Distinct non-nil codes seen in each column.
  const std::vector<std::set<char>>& alphabets() const noexcept { return alphabets_; }

  std::size_t count(Label label) const noexcept;
  double poisonous_fraction() const noexcept;

 private:
  std::vector<Mushroom> mushrooms_;
  std::vector<std::set<char>> alphabets_;
};

// agaricus-lepiota.data format: one record per line, 23 comma-separated
// single-character fields, class first (e/p), '?' for a missing value.
// Throws DataError carrying the 1-based line number.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

// Inverse of parse_dataset: one newline-terminated record per mushroom.
std::string serialize_dataset(const Dataset& dataset);

// Uniform draw with replacement, one rng word. Throws DataError when empty.
const Mushroom& draw_mushroom(const Dataset& dataset, RandomStream& rng);

struct RewardOutcome {
  double agent_reward = 0.0;
  double oracle_reward = 0.0;
  double legacy_oracle_reward = 0.0;
};

// The agent and both oracles see the same realization of the poisonous
// eating coin. `coin_good` selects +5 over -35 and is ignored for safe
// mushrooms.
RewardOutcome realize_reward(const Mushroom& mushroom, Action arm, bool coin_good) noexcept;

// Always consumes one rng word for the eating coin.
RewardOutcome realize_reward(const Mushroom& mushroom, Action arm, RandomStream& rng);

struct ExpectedRewards {
  double eat = 0.0;
  double no_eat = 0.0;
  double oracle = 0.0;
  double legacy_oracle = 0.0;
};

ExpectedRewards expected_rewards(Label label) noexcept;
inline ExpectedRewards expected_rewards(const Mushroom& m) noexcept { return expected_rewards(m.label); }

// Oracle expected reward minus the agent's expected reward for `arm`.
double expected_regret(Label label, Action arm) noexcept;
inline double expected_regret(const Mushroom& m, Action arm) noexcept { return expected_regret(m.label, arm); }

struct SampleSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) estimator; 0 when n < 2
  std::size_t count = 0;
};

SampleSummary summarize(std::span<const double> values) noexcept;

// Realized (oracle - legacy oracle) reward summed over `arms_per_replicate`
// uniform draws, summarized across replicates. Replicate r runs on
// derive_seed(seed, r).
SampleSummary oracle_gap_experiment(const Dataset& dataset, std::size_t replicates,
                                    std::size_t arms_per_replicate, std::uint64_t seed);

// Expected oracle gap per replicate: arms * P(poisonous) * 2.5.
double analytic_oracle_gap(const Dataset& dataset, std::size_t arms_per_replicate) noexcept;

}  // namespace gbsc
