#include "gbsc/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "gbsc/errors.hpp"

namespace gbsc {
namespace {

// Uniform on the open interval (0, 1).
double open_uniform(SplitMix64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(SplitMix64& gen) {
  const double u1 = open_uniform(gen);
  const double u2 = open_uniform(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Marsaglia & Tsang (2000); valid for shape >= 1.
double sample_gamma(double shape, SplitMix64& gen) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal(gen);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = open_uniform(gen);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

const char* to_string(Action action) noexcept {
  return action == Action::Play ? "play" : "no_play";
}

double sample_beta(const BetaParams& params, RandomStream& rng) {
  SplitMix64 gen(rng.next_word());
  const double x = sample_gamma(params.alpha, gen);
  const double y = sample_gamma(params.beta, gen);
  const double s = x / (x + y);
  return std::clamp(s, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

Confidence confidence_of(double raw_sample, std::size_t subset_index) noexcept {
  Confidence c;
  c.subset_index = subset_index;
  c.raw_sample = raw_sample;
  if (raw_sample >= 0.5) {
    c.action = Action::Play;
    c.value = raw_sample;
  } else {
    c.action = Action::NoPlay;
    c.value = 1.0 - raw_sample;
  }
  return c;
}

ActionConfidence pool_confidences(std::span<const Confidence> confidences, std::size_t k) {
  std::vector<Confidence> play;
  std::vector<Confidence> no_play;
  for (const Confidence& c : confidences) {
    (c.action == Action::Play ? play : no_play).push_back(c);
  }

  const auto stronger = [](const Confidence& a, const Confidence& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.subset_index < b.subset_index;
  };

  ActionConfidence out;
  const auto reduce = [&](std::vector<Confidence>& pool, double& mean, std::vector<std::size_t>& who) {
    if (pool.empty()) return;
    const std::size_t take = std::min(k, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(), stronger);
    double sum = 0.0;
    who.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
      sum += pool[i].value;
      who.push_back(pool[i].subset_index);
    }
    mean = sum / static_cast<double>(take);
  };
  reduce(play, out.play, out.play_contributors);
  reduce(no_play, out.no_play, out.no_play_contributors);
  return out;
}

Action greedy_action(const ActionConfidence& confidences) noexcept {
  return confidences.play > confidences.no_play ? Action::Play : Action::NoPlay;
}

const BetaParams& ContextSubsetModel::node(std::optional<char> value) const {
  static const BetaParams prior{};
  if (!value) return nil_;
  const auto it = nodes_.find(*value);
  return it == nodes_.end() ? prior : it->second;
}

BetaParams& ContextSubsetModel::node_for_update(std::optional<char> value) {
  if (!value) return nil_;
  return nodes_.try_emplace(*value).first->second;
}

GbscModel::GbscModel(std::size_t num_subsets, std::size_t k) : subsets_(num_subsets), k_(k) {
  if (num_subsets == 0) throw ConfigError("model needs at least one context subset");
  if (k == 0 || k > num_subsets) {
    throw ConfigError("k must be between 1 and " + std::to_string(num_subsets) +
                      " (the number of context subsets), got " + std::to_string(k));
  }
}

void GbscModel::check_dimension(const ContextVector& context) const {
  if (context.size() != subsets_.size()) {
    throw DimensionError("context has " + std::to_string(context.size()) + " entries, model has " +
                         std::to_string(subsets_.size()) + " subsets");
  }
}

std::vector<Confidence> GbscModel::sample_confidences(const ContextVector& context,
                                                      RandomStream& rng) const {
  check_dimension(context);
  std::vector<Confidence> out;
  out.reserve(subsets_.size());
  for (std::size_t i = 0; i < subsets_.size(); ++i) {
    out.push_back(confidence_of(sample_beta(subsets_[i].node(context[i]), rng), i));
  }
  return out;
}

ActionConfidence GbscModel::action_confidences(const ContextVector& context, RandomStream& rng) const {
  const std::vector<Confidence> sampled = sample_confidences(context, rng);
  return pool_confidences(sampled, k_);
}

Decision epsilon_greedy(ActionConfidence confidences, std::uint64_t epoch, RandomStream& rng) {
  Decision d;
  d.confidences = std::move(confidences);
  if (rng.uniform() >= 1.0 / static_cast<double>(epoch)) {
    d.arm = greedy_action(d.confidences);
    d.explored = false;
  } else {
    d.arm = rng.coin() ? Action::Play : Action::NoPlay;
    d.explored = true;
  }
  return d;
}

Decision GbscModel::select_arm(const ContextVector& context, RandomStream& rng) const {
  return epsilon_greedy(action_confidences(context, rng), epoch_, rng);
}

void GbscModel::update(const ContextVector& context, Action arm, double reward) {
  check_dimension(context);
  if (arm == Action::NoPlay || reward == 0.0) return;
  for (std::size_t i = 0; i < subsets_.size(); ++i) {
    BetaParams& node = subsets_[i].node_for_update(context[i]);
    if (reward > 0.0) {
      node.alpha += reward;
    } else {
      node.beta += -reward;
    }
  }
}

std::vector<PriorRow> GbscModel::export_priors() const {
  std::vector<PriorRow> rows;
  for (std::size_t i = 0; i < subsets_.size(); ++i) {
    const ContextSubsetModel& s = subsets_[i];
    rows.push_back({i, std::nullopt, s.nil_node().alpha, s.nil_node().beta});
    for (const auto& [value, params] : s.value_nodes()) {
      rows.push_back({i, value, params.alpha, params.beta});
    }
  }
  return rows;
}

}  // namespace gbsc
