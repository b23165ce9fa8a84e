#include "gbsc/mushroom.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>

#include "gbsc/errors.hpp"

namespace gbsc {
namespace {

constexpr char kMissingMarker = '?';

Mushroom parse_record(std::string_view line, std::size_t line_no) {
  // 23 single-character fields separated by 22 commas.
  constexpr std::size_t kFields = kMushroomSubsets + 1;
  std::size_t fields = 0;
  std::array<char, kFields> codes{};
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = line.find(',', pos);
    const std::string_view field = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
    if (field.size() != 1) {
      throw DataError("field " + std::to_string(fields + 1) + " must be a single character, got \"" +
                          std::string(field) + "\"",
                      line_no);
    }
    if (fields < kFields) codes[fields] = field[0];
    ++fields;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (fields != kFields) {
    throw DataError("expected " + std::to_string(kFields) + " fields, got " + std::to_string(fields), line_no);
  }

  Mushroom m;
  switch (codes[0]) {
    case 'e': m.label = Label::Safe; break;
    case 'p': m.label = Label::Poisonous; break;
    default: throw DataError(std::string("unknown class '") + codes[0] + "' (expected e or p)", line_no);
  }
  m.context.reserve(kMushroomSubsets);
  for (std::size_t i = 1; i < kFields; ++i) {
    if (codes[i] == kMissingMarker) {
      m.context.emplace_back(std::nullopt);
    } else {
      m.context.emplace_back(codes[i]);
    }
  }
  return m;
}

}  // namespace

Dataset::Dataset(std::vector<Mushroom> mushrooms) : mushrooms_(std::move(mushrooms)) {
  std::size_t width = 0;
  for (const Mushroom& m : mushrooms_) width = std::max(width, m.context.size());
  alphabets_.resize(width);
  for (const Mushroom& m : mushrooms_) {
    for (std::size_t i = 0; i < m.context.size(); ++i) {
      if (m.context[i]) alphabets_[i].insert(*m.context[i]);
    }
  }
}

std::size_t Dataset::count(Label label) const noexcept {
  std::size_t n = 0;
  for (const Mushroom& m : mushrooms_) n += m.label == label ? 1 : 0;
  return n;
}

double Dataset::poisonous_fraction() const noexcept {
  if (mushrooms_.empty()) return 0.0;
  return static_cast<double>(count(Label::Poisonous)) / static_cast<double>(mushrooms_.size());
}

Dataset parse_dataset(std::istream& in) {
  std::vector<Mushroom> mushrooms;
  std::string line;
  std::size_t line_no = 0;
  std::size_t blank_run_start = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (blank_run_start == 0) blank_run_start = line_no;
      continue;
    }
    // Blank lines are only tolerated at the end of the file.
    if (blank_run_start != 0) throw DataError("unexpected blank line", blank_run_start);
    mushrooms.push_back(parse_record(line, line_no));
  }
  if (in.bad()) throw DataError("read error");
  if (mushrooms.empty()) throw DataError("dataset is empty");
  return Dataset(std::move(mushrooms));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");
  return parse_dataset(in);
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  out.reserve(dataset.size() * (2 * (kMushroomSubsets + 1)));
  for (const Mushroom& m : dataset.mushrooms()) {
    out += m.label == Label::Safe ? 'e' : 'p';
    for (const auto& v : m.context) {
      out += ',';
      out += v ? *v : kMissingMarker;
    }
    out += '\n';
  }
  return out;
}

const Mushroom& draw_mushroom(const Dataset& dataset, RandomStream& rng) {
  if (dataset.empty()) throw DataError("cannot draw from an empty dataset");
  return dataset[rng.below(dataset.size())];
}

RewardOutcome realize_reward(const Mushroom& mushroom, Action arm, bool coin_good) noexcept {
  RewardOutcome r;
  if (mushroom.label == Label::Safe) {
    r.agent_reward = arm == Action::Play ? kSafeReward : 0.0;
    r.oracle_reward = kSafeReward;
    r.legacy_oracle_reward = kSafeReward;
    return r;
  }
  const double eaten = coin_good ? kPoisonGoodReward : kPoisonBadReward;
  r.agent_reward = arm == Action::Play ? eaten : 0.0;
  r.oracle_reward = coin_good ? kPoisonGoodReward : 0.0;
  r.legacy_oracle_reward = 0.0;
  return r;
}

RewardOutcome realize_reward(const Mushroom& mushroom, Action arm, RandomStream& rng) {
  const bool coin_good = rng.uniform() < kPoisonGoodProbability;
  return realize_reward(mushroom, arm, coin_good);
}

ExpectedRewards expected_rewards(Label label) noexcept {
  if (label == Label::Safe) return {kSafeReward, 0.0, kSafeReward, kSafeReward};
  const double eat = kPoisonGoodProbability * kPoisonGoodReward + (1.0 - kPoisonGoodProbability) * kPoisonBadReward;
  const double oracle = kPoisonGoodProbability * kPoisonGoodReward;
  return {eat, 0.0, oracle, 0.0};
}

double expected_regret(Label label, Action arm) noexcept {
  const ExpectedRewards e = expected_rewards(label);
  return e.oracle - (arm == Action::Play ? e.eat : e.no_eat);
}

SampleSummary summarize(std::span<const double> values) noexcept {
  SampleSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (const double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

SampleSummary oracle_gap_experiment(const Dataset& dataset, std::size_t replicates,
                                    std::size_t arms_per_replicate, std::uint64_t seed) {
  std::vector<double> gaps(replicates, 0.0);
  for (std::size_t r = 0; r < replicates; ++r) {
    RandomStream rng(derive_seed(seed, r));
    double gap = 0.0;
    for (std::size_t a = 0; a < arms_per_replicate; ++a) {
      const Mushroom& m = draw_mushroom(dataset, rng);
      const RewardOutcome o = realize_reward(m, Action::NoPlay, rng);
      gap += o.oracle_reward - o.legacy_oracle_reward;
    }
    gaps[r] = gap;
  }
  return summarize(gaps);
}

double analytic_oracle_gap(const Dataset& dataset, std::size_t arms_per_replicate) noexcept {
  const double per_arm = expected_rewards(Label::Poisonous).oracle - expected_rewards(Label::Poisonous).legacy_oracle;
  return static_cast<double>(arms_per_replicate) * dataset.poisonous_fraction() * per_arm;
}

}  // namespace gbsc
