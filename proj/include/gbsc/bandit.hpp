#pragma once

// Greedy Bandits with Sampled Context.
//
// Each context subset (categorical feature) owns one Beta random variable per
// observed value plus a reserved nil node for missing values. To score an
// arm, the node activated by each subset is sampled once; a sample s is
// folded into a confidence max(s, 1 - s) that votes for Play when s >= 0.5
// and for NoPlay otherwise. Each action's confidence is the mean of the k
// strongest votes it received, and an epsilon-greedy rule with epsilon = 1/j
// picks the arm. Played arms update every activated node by the reward:
// alpha grows on positive rewards, beta on negative ones.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gbsc/random.hpp"

namespace gbsc {

enum class Action : std::uint8_t { NoPlay = 0, Play = 1 };

const char* to_string(Action action) noexcept;

// One categorical code per subset; std::nullopt is the nil value.
using ContextVector = std::vector<std::optional<char>>;

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const noexcept { return alpha / (alpha + beta); }

  bool operator==(const BetaParams&) const = default;
};

// One draw from Beta(alpha, beta), alpha, beta >= 1, strictly inside (0, 1).
//
// Consumes exactly one word of `rng`. That word seeds a private SplitMix64
// generator which drives two Marsaglia-Tsang Gamma draws (Box-Muller normals,
// squeeze + log acceptance) combined as X / (X + Y). The rejection loops run
// on the private generator, so the caller's stream advances by a fixed amount
// regardless of how many proposals were rejected.
double sample_beta(const BetaParams& params, RandomStream& rng);

struct Confidence {
  std::size_t subset_index = 0;
  Action action = Action::Play;
  double value = 0.5;       // in [0.5, 1]
  double raw_sample = 0.5;  // in (0, 1)
};

// Folds a raw sample about 0.5. The boundary 0.5 belongs to Play.
Confidence confidence_of(double raw_sample, std::size_t subset_index) noexcept;

// Confidence reported for an action whose pool is empty. It is the smallest
// attainable confidence, so any action backed by a sample wins the argmax.
inline constexpr double kNeutralConfidence = 0.5;

struct ActionConfidence {
  double play = kNeutralConfidence;
  double no_play = kNeutralConfidence;
  std::vector<std::size_t> play_contributors;
  std::vector<std::size_t> no_play_contributors;

  double of(Action action) const noexcept { return action == Action::Play ? play : no_play; }
  const std::vector<std::size_t>& contributors(Action action) const noexcept {
    return action == Action::Play ? play_contributors : no_play_contributors;
  }
};

// Splits confidences into per-action pools and averages the k highest of
// each. A pool with fewer than k members averages all of them; an empty pool
// reports kNeutralConfidence. Values are summed in descending order, ties
// ordered by subset index. Contributors are listed in that same order.
ActionConfidence pool_confidences(std::span<const Confidence> confidences, std::size_t k);

// Exploit-branch arm. Exact ties go to NoPlay.
Action greedy_action(const ActionConfidence& confidences) noexcept;

struct Decision {
  Action arm = Action::NoPlay;
  bool explored = false;
  ActionConfidence confidences;
};

// Epsilon-greedy with epsilon = 1 / epoch: draws u uniform on [0, 1) and
// exploits iff u >= 1 / epoch, otherwise flips a fair coin (one more word).
Decision epsilon_greedy(ActionConfidence confidences, std::uint64_t epoch, RandomStream& rng);

class ContextSubsetModel {
 public:
  // Node for `value`; unseen values read as the Beta(1, 1) prior.
  const BetaParams& node(std::optional<char> value) const;

  // Node for `value`, created at Beta(1, 1) on first use.
  BetaParams& node_for_update(std::optional<char> value);

  const BetaParams& nil_node() const noexcept { return nil_; }
  const std::map<char, BetaParams>& value_nodes() const noexcept { return nodes_; }

  // Number of nodes including the nil node.
  std::size_t size() const noexcept { return nodes_.size() + 1; }

 private:
  BetaParams nil_;
  std::map<char, BetaParams> nodes_;
};

struct PriorRow {
  std::size_t subset_index = 0;
  std::optional<char> value;  // nullopt for the nil node
  double alpha = 1.0;
  double beta = 1.0;

  bool operator==(const PriorRow&) const = default;
};

// Single-writer: select_arm is const and may be shared by concurrent readers,
// but update/advance_epoch require exclusive access.
class GbscModel {
 public:
  // Throws ConfigError unless 1 <= k <= num_subsets.
  GbscModel(std::size_t num_subsets, std::size_t k);

  std::size_t num_subsets() const noexcept { return subsets_.size(); }
  std::size_t k() const noexcept { return k_; }
  std::uint64_t epoch() const noexcept { return epoch_; }
  double exploration_rate() const noexcept { return 1.0 / static_cast<double>(epoch_); }

  const ContextSubsetModel& subset(std::size_t index) const { return subsets_.at(index); }

  // Samples every activated node once, in subset order (one rng word each).
  // Throws DimensionError on a length mismatch.
  std::vector<Confidence> sample_confidences(const ContextVector& context, RandomStream& rng) const;

  ActionConfidence action_confidences(const ContextVector& context, RandomStream& rng) const;

  // Consumes num_subsets() words for the confidences, one word for the
  // exploration draw, and one more for the fair coin when exploring.
  Decision select_arm(const ContextVector& context, RandomStream& rng) const;

  // Reward-scaled posterior update of every activated node. NoPlay and a
  // zero reward leave the model unchanged.
  void update(const ContextVector& context, Action arm, double reward);
  void update(const ContextVector& context, const Decision& decision, double reward) {
    update(context, decision.arm, reward);
  }

  void advance_epoch() noexcept { ++epoch_; }

  // Subsets in order; within a subset the nil node first, then values in
  // ascending code order.
  std::vector<PriorRow> export_priors() const;

 private:
  void check_dimension(const ContextVector& context) const;

  std::vector<ContextSubsetModel> subsets_;
  std::size_t k_;
  std::uint64_t epoch_ = 1;
};

}  // namespace gbsc
