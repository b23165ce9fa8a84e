#include "gbsc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gbsc/errors.hpp"

namespace gbsc {
namespace {

std::uint64_t evaluation_seed(std::uint64_t pipeline_seed, std::size_t point) {
  return derive_seed(derive_seed(pipeline_seed, kEvaluationStream), point);
}

// Runs the training loop on `model`, invoking on_epoch(point) after each
// completed epoch (point counts epochs from 1).
template <typename OnEpoch>
void run_training(GbscModel& model, const TrainingConfig& config, const Dataset& dataset, OnEpoch&& on_epoch) {
  RandomStream rng(derive_seed(config.seed, kTrainingStream));
  for (std::size_t t = 1; t <= config.total_training_arms; ++t) {
    const Mushroom& m = draw_mushroom(dataset, rng);
    const Decision d = model.select_arm(m.context, rng);
    const RewardOutcome o = realize_reward(m, d.arm, rng);
    model.update(m.context, d, o.agent_reward);
    if (t % config.epsilon_epoch_length == 0) {
      model.advance_epoch();
      on_epoch(t / config.epsilon_epoch_length);
    }
  }
}

GbscModel trained_model(const TrainingConfig& config, const Dataset& dataset) {
  GbscModel model(kMushroomSubsets, config.k);
  run_training(model, config, dataset, [](std::size_t) {});
  return model;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

void TrainingConfig::validate(std::size_t num_subsets) const {
  if (epsilon_epoch_length == 0) throw ConfigError("epsilon epoch length must be positive");
  if (eval_arms == 0) throw ConfigError("evaluation arms must be positive");
  if (eval_replicates == 0) throw ConfigError("evaluation replicates must be positive");
  if (k == 0 || k > num_subsets) {
    throw ConfigError("k must be between 1 and " + std::to_string(num_subsets) +
                      " (the number of context subsets), got " + std::to_string(k));
  }
}

EvalResult evaluate_policy(const Dataset& dataset, std::size_t eval_arms, std::size_t replicates,
                           std::uint64_t seed, const Policy& policy, Execution execution) {
  EvalResult result;
  result.per_arm.assign(eval_arms, 0.0);
  result.replicate_cumulative.assign(replicates, 0.0);
  if (eval_arms == 0 || replicates == 0) return result;

  std::vector<std::vector<double>> regrets(replicates);
  for_each_replicate(replicates, execution, [&](std::size_t r) {
    RandomStream rng(derive_seed(seed, r));
    std::vector<double>& row = regrets[r];
    row.resize(eval_arms);
    for (std::size_t a = 0; a < eval_arms; ++a) {
      const Mushroom& m = draw_mushroom(dataset, rng);
      row[a] = expected_regret(m, policy(m, rng));
    }
  });

  // Fixed reduction order keeps serial and parallel runs bitwise equal.
  for (std::size_t r = 0; r < replicates; ++r) {
    double total = 0.0;
    for (std::size_t a = 0; a < eval_arms; ++a) {
      result.per_arm[a] += regrets[r][a];
      total += regrets[r][a];
    }
    result.replicate_cumulative[r] = total;
  }
  for (double& v : result.per_arm) v /= static_cast<double>(replicates);
  result.cumulative = std::accumulate(result.per_arm.begin(), result.per_arm.end(), 0.0);
  return result;
}

EvalResult evaluate(const GbscModel& model, const Dataset& dataset, std::size_t eval_arms,
                    std::size_t replicates, std::uint64_t seed, Execution execution) {
  return evaluate_policy(
      dataset, eval_arms, replicates, seed,
      [&model](const Mushroom& m, RandomStream& rng) { return model.select_arm(m.context, rng).arm; },
      execution);
}

EvalResult random_policy_curve(const Dataset& dataset, std::size_t eval_arms, std::size_t replicates,
                               std::uint64_t seed, Execution execution) {
  return evaluate_policy(
      dataset, eval_arms, replicates, seed,
      [](const Mushroom&, RandomStream& rng) { return rng.coin() ? Action::Play : Action::NoPlay; },
      execution);
}

double analytic_random_regret(const Dataset& dataset, std::size_t arms) noexcept {
  const double p = dataset.poisonous_fraction();
  const auto mixed = [](Label label) {
    return 0.5 * expected_regret(label, Action::Play) + 0.5 * expected_regret(label, Action::NoPlay);
  };
  return static_cast<double>(arms) * ((1.0 - p) * mixed(Label::Safe) + p * mixed(Label::Poisonous));
}

double analytic_regret_floor(const Dataset& dataset, std::size_t arms) noexcept {
  const double p = dataset.poisonous_fraction();
  return static_cast<double>(arms) * p * expected_regret(Label::Poisonous, Action::NoPlay);
}

TrainResult train(const TrainingConfig& config, const Dataset& dataset, CurveMode curve_mode,
                  Execution execution) {
  config.validate();
  if (dataset.empty()) throw DataError("cannot train on an empty dataset");
  TrainResult result{GbscModel(kMushroomSubsets, config.k), {}};
  run_training(result.model, config, dataset, [&](std::size_t point) {
    if (curve_mode == CurveMode::Skip) return;
    EvalResult eval = evaluate(result.model, dataset, config.eval_arms, config.eval_replicates,
                               evaluation_seed(config.seed, point), execution);
    result.curve.points.push_back(
        {point * config.epsilon_epoch_length, std::move(eval.per_arm), eval.cumulative});
  });
  return result;
}

double final_cumulative_regret(const TrainingConfig& config, const Dataset& dataset) {
  config.validate();
  const GbscModel model = trained_model(config, dataset);
  const std::size_t point = config.total_training_arms / config.epsilon_epoch_length;
  return evaluate(model, dataset, config.eval_arms, config.eval_replicates, evaluation_seed(config.seed, point))
      .cumulative;
}

std::vector<KSweepRow> sweep_k(std::span<const std::size_t> k_values, std::size_t replicates,
                               const TrainingConfig& base, const Dataset& dataset, Execution execution) {
  if (replicates == 0) throw ConfigError("replicates must be positive");
  for (const std::size_t k : k_values) {
    TrainingConfig c = base;
    c.k = k;
    c.validate();
  }

  // One flat job list over (k, replicate) pairs.
  const std::size_t jobs = k_values.size() * replicates;
  std::vector<double> finals(jobs, 0.0);
  for_each_replicate(jobs, execution, [&](std::size_t job) {
    TrainingConfig c = base;
    c.k = k_values[job / replicates];
    c.seed = derive_seed(derive_seed(base.seed, c.k), job % replicates);
    finals[job] = final_cumulative_regret(c, dataset);
  });

  std::vector<KSweepRow> rows;
  rows.reserve(k_values.size());
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    rows.push_back({k_values[i], summarize(std::span(finals).subspan(i * replicates, replicates))});
  }
  return rows;
}

std::uint64_t UtilizationTable::total(Action action) const noexcept {
  std::uint64_t sum = 0;
  for (const auto& c : counts) sum += c[static_cast<std::size_t>(action)];
  return sum;
}

std::uint64_t UtilizationTable::subset_total(std::size_t subset) const noexcept {
  return counts[subset][0] + counts[subset][1];
}

UtilizationTable utilization_counts(const TrainingConfig& config, const Dataset& dataset,
                                    std::size_t replicates, Execution execution) {
  config.validate();
  using Counts = std::vector<std::array<std::uint64_t, 2>>;
  std::vector<Counts> per_replicate(replicates, Counts(kMushroomSubsets, {0, 0}));
  for_each_replicate(replicates, execution, [&](std::size_t r) {
    TrainingConfig c = config;
    c.seed = derive_seed(config.seed, r);
    const GbscModel model = trained_model(c, dataset);
    RandomStream rng(evaluation_seed(c.seed, c.total_training_arms / c.epsilon_epoch_length));
    Counts& counts = per_replicate[r];
    for (std::size_t a = 0; a < c.eval_arms; ++a) {
      const Mushroom& m = draw_mushroom(dataset, rng);
      const Decision d = model.select_arm(m.context, rng);
      for (const Action action : {Action::NoPlay, Action::Play}) {
        for (const std::size_t s : d.confidences.contributors(action)) {
          ++counts[s][static_cast<std::size_t>(action)];
        }
      }
    }
  });

  UtilizationTable table;
  table.counts.assign(kMushroomSubsets, {0, 0});
  table.replicates = replicates;
  table.arms_per_replicate = config.eval_arms;
  table.k = config.k;
  for (const Counts& counts : per_replicate) {
    for (std::size_t s = 0; s < kMushroomSubsets; ++s) {
      table.counts[s][0] += counts[s][0];
      table.counts[s][1] += counts[s][1];
    }
  }
  return table;
}

std::vector<double> MaskConfig::probabilities(std::size_t num_subsets) const {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("mask rate must lie in [0, 1]");
  std::vector<double> p(num_subsets, 0.0);
  switch (mode) {
    case MaskMode::None:
      break;
    case MaskMode::Random:
      std::fill(p.begin(), p.end(), rate);
      break;
    case MaskMode::Priority: {
      if (priority_weights.size() != num_subsets) {
        throw ConfigError("priority mode needs " + std::to_string(num_subsets) + " subset weights, got " +
                          std::to_string(priority_weights.size()));
      }
      double total = 0.0;
      for (const double w : priority_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("priority weights must be finite and nonnegative");
        total += w;
      }
      if (total <= 0.0) throw ConfigError("priority weights are all zero");
      for (std::size_t s = 0; s < num_subsets; ++s) {
        const double scaled = priority_weights[s] * static_cast<double>(num_subsets) / total;
        p[s] = std::min(1.0, rate * scaled);
      }
      break;
    }
  }
  return p;
}

std::vector<double> utilization_weights(const UtilizationTable& table) {
  std::vector<double> w(table.counts.size());
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = static_cast<double>(table.subset_total(s));
  return w;
}

ContextVector apply_mask(const ContextVector& context, std::span<const double> probabilities,
                         RandomStream& rng) {
  ContextVector out = context;
  for (std::size_t s = 0; s < out.size(); ++s) {
    // One word per subset whatever the probability.
    const double u = rng.uniform();
    if (s < probabilities.size() && u < probabilities[s]) out[s].reset();
  }
  return out;
}

MaskResult mask_experiment(const TrainingConfig& config, const MaskConfig& mask, const Dataset& dataset,
                           std::size_t replicates, Execution execution) {
  config.validate();
  if (replicates == 0) throw ConfigError("replicates must be positive");
  const std::vector<double> probabilities = mask.probabilities(kMushroomSubsets);

  std::vector<double> masked(replicates, 0.0);
  std::vector<double> unmasked(replicates, 0.0);
  for_each_replicate(replicates, execution, [&](std::size_t r) {
    TrainingConfig c = config;
    c.seed = derive_seed(config.seed, r);
    const GbscModel model = trained_model(c, dataset);
    const std::uint64_t eval_seed = evaluation_seed(c.seed, c.total_training_arms / c.epsilon_epoch_length);
    double masked_total = 0.0;
    double unmasked_total = 0.0;
    for (std::size_t e = 0; e < c.eval_replicates; ++e) {
      RandomStream draws(derive_seed(eval_seed, e));
      RandomStream mask_rng(derive_seed(derive_seed(c.seed, kMaskStream), e));
      const std::uint64_t selection_seed = draws.next_word();
      RandomStream intact_selection(selection_seed);
      RandomStream masked_selection(selection_seed);
      for (std::size_t a = 0; a < c.eval_arms; ++a) {
        const Mushroom& m = draw_mushroom(dataset, draws);
        const ContextVector hidden = apply_mask(m.context, probabilities, mask_rng);
        unmasked_total += expected_regret(m, model.select_arm(m.context, intact_selection).arm);
        masked_total += expected_regret(m, model.select_arm(hidden, masked_selection).arm);
      }
    }
    masked[r] = masked_total / static_cast<double>(c.eval_replicates);
    unmasked[r] = unmasked_total / static_cast<double>(c.eval_replicates);
  });

  std::vector<double> deltas(replicates);
  for (std::size_t r = 0; r < replicates; ++r) deltas[r] = masked[r] - unmasked[r];

  MaskResult result;
  result.replicates = replicates;
  result.masked_cumulative = mean_of(masked);
  result.unmasked_cumulative = mean_of(unmasked);
  result.delta = result.masked_cumulative - result.unmasked_cumulative;
  result.delta_stddev = summarize(deltas).stddev;
  return result;
}

}  // namespace gbsc
