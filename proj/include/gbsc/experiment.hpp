#pragma once

// Training, evaluation and the feature-importance / masking studies on the
// Mushroom environment.
//
// Seeding: a pipeline seeded with s trains on derive_seed(s, kTrainingStream)
// and evaluates curve point p on derive_seed(derive_seed(s, kEvaluationStream), p).
// Multi-replicate studies run replicate r with pipeline seed
// derive_seed(config.seed, r); the k-sweep uses derive_seed(derive_seed(seed, k), r).

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gbsc/bandit.hpp"
#include "gbsc/mushroom.hpp"
#include "gbsc/random.hpp"
#include "gbsc/replicates.hpp"

namespace gbsc {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr std::uint64_t kTrainingStream = 1;
inline constexpr std::uint64_t kEvaluationStream = 2;
inline constexpr std::uint64_t kMaskStream = 3;

struct TrainingConfig {
  std::size_t total_training_arms = 1500;
  std::size_t epsilon_epoch_length = 150;
  std::size_t eval_arms = 50;
  std::size_t eval_replicates = 10;
  std::size_t k = 3;
  std::uint64_t seed = kDefaultSeed;

  // Throws ConfigError. total_training_arms may be zero; every other count
  // must be positive and k must lie in [1, num_subsets].
  void validate(std::size_t num_subsets = kMushroomSubsets) const;
};

struct EvalResult {
  std::vector<double> per_arm;                // mean expected regret by arm position
  double cumulative = 0.0;                    // sum of per_arm
  std::vector<double> replicate_cumulative;   // one total per replicate
};

// Maps a presented mushroom to an arm; may draw from the stream.
using Policy = std::function<Action(const Mushroom&, RandomStream&)>;

// Runs `replicates` independent episodes of `eval_arms` uniform draws and
// scores each chosen arm by expected_regret. Replicate r runs on
// derive_seed(seed, r): one word for the draw, then whatever the policy uses.
EvalResult evaluate_policy(const Dataset& dataset, std::size_t eval_arms, std::size_t replicates,
                           std::uint64_t seed, const Policy& policy,
                           Execution execution = Execution::Serial);

// Frozen-posterior evaluation of a model under its current epsilon schedule.
EvalResult evaluate(const GbscModel& model, const Dataset& dataset, std::size_t eval_arms,
                    std::size_t replicates, std::uint64_t seed, Execution execution = Execution::Serial);

// Fair-coin policy with the same accounting as evaluate().
EvalResult random_policy_curve(const Dataset& dataset, std::size_t eval_arms, std::size_t replicates,
                               std::uint64_t seed, Execution execution = Execution::Serial);

// Mean expected regret of the fair-coin and eat-iff-safe policies, from the
// dataset's class fractions.
double analytic_random_regret(const Dataset& dataset, std::size_t arms) noexcept;
double analytic_regret_floor(const Dataset& dataset, std::size_t arms) noexcept;

struct CurvePoint {
  std::size_t arms_completed = 0;
  std::vector<double> per_arm_expected_regret;
  double cumulative_expected_regret = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

struct RegretCurve {
  std::vector<CurvePoint> points;

  bool operator==(const RegretCurve&) const = default;
};

struct TrainResult {
  GbscModel model;
  RegretCurve curve;
};

enum class CurveMode { Record, Skip };

// Sequential draw -> select -> reward -> update loop. After every
// epsilon_epoch_length arms the epoch counter advances and, under
// CurveMode::Record, the updated policy is evaluated and appended to the
// curve. Evaluation replicates are distributed per `execution`.
TrainResult train(const TrainingConfig& config, const Dataset& dataset,
                  CurveMode curve_mode = CurveMode::Record, Execution execution = Execution::Serial);

// Trains with CurveMode::Skip and evaluates the final model once on the
// stream the last curve point would have used.
double final_cumulative_regret(const TrainingConfig& config, const Dataset& dataset);

struct KSweepRow {
  std::size_t k = 0;
  SampleSummary cumulative_regret;
};

// Throws ConfigError for an empty replicate count or any k outside
// [1, kMushroomSubsets].
std::vector<KSweepRow> sweep_k(std::span<const std::size_t> k_values, std::size_t replicates,
                               const TrainingConfig& base, const Dataset& dataset,
                               Execution execution = Execution::Serial);

struct UtilizationTable {
  // counts[subset][action], action indexed by static_cast<size_t>(Action).
  std::vector<std::array<std::uint64_t, 2>> counts;
  std::size_t replicates = 0;
  std::size_t arms_per_replicate = 0;
  std::size_t k = 0;

  std::uint64_t total(Action action) const noexcept;
  std::uint64_t subset_total(std::size_t subset) const noexcept;
};

// For each replicate, trains a model and runs eval_arms frozen selections,
// counting each subset every time it is among the top-k contributors of
// either action's pool, whichever arm is finally chosen.
UtilizationTable utilization_counts(const TrainingConfig& config, const Dataset& dataset,
                                    std::size_t replicates, Execution execution = Execution::Serial);

enum class MaskMode { None, Random, Priority };

struct MaskConfig {
  MaskMode mode = MaskMode::None;
  double rate = 0.0;
  std::vector<double> priority_weights;  // per subset, Priority mode only

  // Per-subset masking probabilities, each independent per arm.
  // None: 0. Random: rate. Priority: min(1, rate * w_s), where w_s is the
  // subset's weight rescaled to average 1, so both modes mask the same
  // expected number of subsets at rates where no cap applies.
  // Throws ConfigError on a rate outside [0, 1] or bad priority weights.
  std::vector<double> probabilities(std::size_t num_subsets) const;
};

// Priority weights from a utilization table: total count per subset.
std::vector<double> utilization_weights(const UtilizationTable& table);

ContextVector apply_mask(const ContextVector& context, std::span<const double> probabilities,
                         RandomStream& rng);

struct MaskResult {
  double masked_cumulative = 0.0;
  double unmasked_cumulative = 0.0;
  double delta = 0.0;         // masked - unmasked
  double delta_stddev = 0.0;  // across replicates
  std::size_t replicates = 0;
};

// Trains one model per replicate, then evaluates it twice on common draws:
// intact contexts and masked contexts. Both selections consume identical
// random words, so any difference comes from the mask alone.
MaskResult mask_experiment(const TrainingConfig& config, const MaskConfig& mask, const Dataset& dataset,
                           std::size_t replicates, Execution execution = Execution::Serial);

}  // namespace gbsc
