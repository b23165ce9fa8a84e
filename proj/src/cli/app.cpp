#include "gbsc/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gbsc/errors.hpp"
#include "gbsc/experiment.hpp"
#include "gbsc/mushroom.hpp"
#include "output.hpp"

#ifndef GBSC_VERSION
#define GBSC_VERSION "dev"
#endif

namespace gbsc::cli {
namespace {

using nlohmann::ordered_json;

// Usage problems detected after flag parsing (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string data;
  std::uint64_t seed = kDefaultSeed;
  std::size_t k = 3;
  std::size_t trials = 1500;
  std::size_t epoch = 150;
  std::size_t eval_arms = 50;
  std::size_t eval_replicates = 10;
  std::size_t replicates = 10;
  std::string ks = "1..22";
  std::string mode = "random";
  double rate = 0.0;
  std::string utilization;
  std::string out = ".";
  std::string format = "csv";
  double tolerance = -1.0;
  bool serial = false;
};

struct LoadedData {
  Dataset dataset;
  std::string sha256;
};

LoadedData load_data(const Options& o) {
  std::string path = o.data;
  if (path.empty()) {
    if (const char* env = std::getenv("GBSC_DATA"); env != nullptr) path = env;
  }
  if (path.empty()) throw UsageError("no dataset: pass --data PATH or set GBSC_DATA");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  std::istringstream text(bytes);
  return {parse_dataset(text), sha256_hex(bytes)};
}

Execution execution_of(const Options& o) { return o.serial ? Execution::Serial : Execution::Parallel; }

TrainingConfig training_config(const Options& o) {
  TrainingConfig c;
  c.total_training_arms = o.trials;
  c.epsilon_epoch_length = o.epoch;
  c.eval_arms = o.eval_arms;
  c.eval_replicates = o.eval_replicates;
  c.k = o.k;
  c.seed = o.seed;
  c.validate();
  return c;
}

ordered_json config_json(const TrainingConfig& c) {
  ordered_json j;
  j["trials"] = c.total_training_arms;
  j["epoch"] = c.epsilon_epoch_length;
  j["eval_arms"] = c.eval_arms;
  j["eval_replicates"] = c.eval_replicates;
  j["k"] = c.k;
  return j;
}

std::string manifest(std::string_view command, const Options& o, const LoadedData& data, ordered_json config,
                     const std::vector<std::string>& artifacts) {
  ordered_json m;
  m["tool"] = "gbsc";
  m["version"] = GBSC_VERSION;
  m["command"] = command;
  m["seed"] = o.seed;
  m["config"] = std::move(config);
  m["dataset"] = {{"sha256", data.sha256}, {"records", data.dataset.size()}};
  m["artifacts"] = artifacts;
  return dump_json(m);
}

std::string table_name(std::string_view stem, const Options& o) {
  return std::string(stem) + (o.format == "json" ? ".json" : ".csv");
}

std::string table_text(const Table& t, const Options& o) {
  return o.format == "json" ? dump_json(t.to_json()) : t.to_csv();
}

std::string priors_json(const GbscModel& model) {
  ordered_json subsets = ordered_json::array();
  for (std::size_t i = 0; i < model.num_subsets(); ++i) {
    ordered_json s;
    s["index"] = i;
    s["name"] = i < kMushroomAttributeNames.size() ? std::string(kMushroomAttributeNames[i]) : std::string();
    s["nodes"] = ordered_json::array();
    subsets.push_back(std::move(s));
  }
  for (const PriorRow& row : model.export_priors()) {
    ordered_json node;
    node["value"] = row.value ? ordered_json(std::string(1, *row.value)) : ordered_json(nullptr);
    node["alpha"] = row.alpha;
    node["beta"] = row.beta;
    subsets[row.subset_index]["nodes"].push_back(std::move(node));
  }
  ordered_json j;
  j["k"] = model.k();
  j["epoch"] = model.epoch();
  j["subsets"] = std::move(subsets);
  return dump_json(j);
}

void publish(ArtifactSet& files, std::string_view command, const Options& o, const LoadedData& data,
             ordered_json config, std::ostream& out) {
  std::vector<std::string> names = files.names();
  names.push_back("manifest.json");
  files.add("manifest.json", manifest(command, o, data, std::move(config), names));
  files.commit(o.out);
  for (const std::string& n : names) out << (std::filesystem::path(o.out) / n).string() << '\n';
}

int cmd_train(const Options& o, std::ostream& out) {
  const TrainingConfig config = training_config(o);
  const LoadedData data = load_data(o);
  const TrainResult result = train(config, data.dataset, CurveMode::Record, execution_of(o));

  Table curve({"arms_completed", "arm_index", "expected_regret", "cumulative"});
  for (const CurvePoint& p : result.curve.points) {
    for (std::size_t a = 0; a < p.per_arm_expected_regret.size(); ++a) {
      curve.add_row({static_cast<std::int64_t>(p.arms_completed), static_cast<std::int64_t>(a + 1),
                     p.per_arm_expected_regret[a], p.cumulative_expected_regret});
    }
  }
  ArtifactSet files;
  files.add(table_name("curve", o), table_text(curve, o));
  files.add("priors.json", priors_json(result.model));
  publish(files, "train", o, data, config_json(config), out);
  return kExitOk;
}

int cmd_sweep_k(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.replicates == 0) throw UsageError("--replicates must be positive");
  const std::vector<std::size_t> ks = parse_k_list(o.ks);
  TrainingConfig config = training_config(o);
  for (const std::size_t k : ks) {
    if (k > kMushroomSubsets) {
      throw ConfigError("k must be between 1 and " + std::to_string(kMushroomSubsets) +
                        " (the number of context subsets), got " + std::to_string(k));
    }
  }
  const LoadedData data = load_data(o);
  const std::vector<KSweepRow> rows = sweep_k(ks, o.replicates, config, data.dataset, execution_of(o));
  if (o.replicates < 2) err << "warning: stddev is undefined with a single replicate\n";

  Table table({"k", "mean_cum_regret", "stddev", "replicates"});
  for (const KSweepRow& r : rows) {
    const Cell sd = r.cumulative_regret.count < 2 ? Cell{} : Cell{r.cumulative_regret.stddev};
    table.add_row({static_cast<std::int64_t>(r.k), r.cumulative_regret.mean, sd,
                   static_cast<std::int64_t>(r.cumulative_regret.count)});
  }
  ArtifactSet files;
  files.add(table_name("ksweep", o), table_text(table, o));
  ordered_json cfg = config_json(config);
  cfg.erase("k");
  cfg["ks"] = ks;
  cfg["replicates"] = o.replicates;
  publish(files, "sweep-k", o, data, std::move(cfg), out);
  return kExitOk;
}

int cmd_importance(const Options& o, std::ostream& out) {
  if (o.replicates == 0) throw UsageError("--replicates must be positive");
  const TrainingConfig config = training_config(o);
  const LoadedData data = load_data(o);
  const UtilizationTable table = utilization_counts(config, data.dataset, o.replicates, execution_of(o));

  // Priors of the first replicate's model, one of the models counted above.
  TrainingConfig first = config;
  first.seed = derive_seed(config.seed, 0);
  const TrainResult trained = train(first, data.dataset, CurveMode::Skip);

  Table util({"subset_index", "subset_name", "play_count", "noplay_count"});
  for (std::size_t s = 0; s < table.counts.size(); ++s) {
    util.add_row({static_cast<std::int64_t>(s), std::string(kMushroomAttributeNames[s]),
                  static_cast<std::int64_t>(table.counts[s][static_cast<std::size_t>(Action::Play)]),
                  static_cast<std::int64_t>(table.counts[s][static_cast<std::size_t>(Action::NoPlay)])});
  }
  ArtifactSet files;
  files.add(table_name("utilization", o), table_text(util, o));
  files.add("priors.json", priors_json(trained.model));
  ordered_json cfg = config_json(config);
  cfg["replicates"] = o.replicates;
  publish(files, "importance", o, data, std::move(cfg), out);
  return kExitOk;
}

// Reads subset weights (play_count + noplay_count) from a utilization CSV.
std::vector<double> read_utilization_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open utilization file '" + path + "'");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DataError("utilization file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "subset_index,subset_name,play_count,noplay_count") {
    throw DataError("unexpected utilization header '" + line + "'", line_no);
  }
  std::vector<double> weights(kMushroomSubsets, 0.0);
  std::vector<bool> seen(kMushroomSubsets, false);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 4) throw DataError("expected 4 fields", line_no);
    const auto number = [&](const std::string& f) {
      long long v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) throw DataError("bad number '" + f + "'", line_no);
      return v;
    };
    const long long index = number(fields[0]);
    if (index < 0 || index >= static_cast<long long>(kMushroomSubsets)) {
      throw DataError("subset index out of range", line_no);
    }
    const long long play = number(fields[2]);
    const long long no_play = number(fields[3]);
    if (play < 0 || no_play < 0) throw DataError("negative count", line_no);
    weights[static_cast<std::size_t>(index)] = static_cast<double>(play + no_play);
    seen[static_cast<std::size_t>(index)] = true;
  }
  for (std::size_t s = 0; s < kMushroomSubsets; ++s) {
    if (!seen[s]) throw DataError("utilization file has no row for subset " + std::to_string(s));
  }
  return weights;
}

int cmd_mask(const Options& o, std::ostream& out) {
  if (o.replicates == 0) throw UsageError("--replicates must be positive");
  if (!(o.rate >= 0.0 && o.rate <= 1.0)) throw UsageError("--rate must lie in [0, 1]");
  MaskConfig mask;
  mask.rate = o.rate;
  if (o.mode == "priority") {
    if (o.utilization.empty()) throw UsageError("--mode priority requires --utilization PATH");
    mask.mode = MaskMode::Priority;
  } else {
    mask.mode = MaskMode::Random;
  }
  const TrainingConfig config = training_config(o);
  const LoadedData data = load_data(o);
  if (mask.mode == MaskMode::Priority) mask.priority_weights = read_utilization_weights(o.utilization);
  const MaskResult r = mask_experiment(config, mask, data.dataset, o.replicates, execution_of(o));

  Table table({"mode", "rate", "masked_cum", "unmasked_cum", "delta", "replicates"});
  table.add_row({o.mode, o.rate, r.masked_cumulative, r.unmasked_cumulative, r.delta,
                 static_cast<std::int64_t>(r.replicates)});
  ArtifactSet files;
  files.add(table_name("mask", o), table_text(table, o));
  ordered_json cfg = config_json(config);
  cfg["mode"] = o.mode;
  cfg["rate"] = o.rate;
  cfg["replicates"] = o.replicates;
  if (mask.mode == MaskMode::Priority) cfg["priority_weights"] = mask.priority_weights;
  publish(files, "mask", o, data, std::move(cfg), out);
  return kExitOk;
}

int cmd_oracle_check(const Options& o, std::size_t arms, std::ostream& out) {
  if (o.replicates < 2) throw UsageError("--replicates must be at least 2");
  const LoadedData data = load_data(o);
  const SampleSummary gap = oracle_gap_experiment(data.dataset, o.replicates, arms, o.seed);
  const double analytic = analytic_oracle_gap(data.dataset, arms);

  // Default tolerance: three standard errors of the binomial gap model, in
  // which each arm adds 5 with probability P(poisonous) / 2.
  double tolerance = o.tolerance;
  if (tolerance < 0.0) {
    const double q = data.dataset.poisonous_fraction() / 2.0;
    const double sd = 5.0 * std::sqrt(static_cast<double>(arms) * q * (1.0 - q));
    tolerance = 3.0 * sd / std::sqrt(static_cast<double>(o.replicates));
  }
  const bool degenerate = arms == 0;
  const bool within = std::abs(gap.mean - analytic) <= tolerance;

  out << std::fixed << std::setprecision(4);
  out << "replicates      " << o.replicates << '\n';
  out << "arms            " << arms << '\n';
  out << "seed            " << o.seed << '\n';
  out << "mean_gap        " << gap.mean << '\n';
  out << "stddev_gap      " << gap.stddev << '\n';
  out << "analytic_mean   " << analytic << '\n';
  out << "tolerance       " << tolerance << '\n';
  out << "status          " << (degenerate ? "degenerate (no arms)" : within ? "ok" : "outside tolerance") << '\n';
  return within ? kExitOk : kExitCheckFailed;
}

void add_data_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--data", o.data, "Path to agaricus-lepiota.data (falls back to $GBSC_DATA)");
  cmd.add_option("--seed", o.seed, "Master seed")->capture_default_str();
}

void add_training_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--trials", o.trials, "Training arms")->capture_default_str();
  cmd.add_option("--epoch", o.epoch, "Training arms per epsilon epoch and per curve point")->capture_default_str();
  cmd.add_option("--eval-arms", o.eval_arms, "Arms per evaluation episode")->capture_default_str();
  cmd.add_option("--eval-replicates", o.eval_replicates, "Evaluation episodes per curve point")
      ->capture_default_str();
}

void add_output_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd.add_option("--format", o.format, "Format of tabular outputs")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd.add_flag("--serial", o.serial, "Run replicates on the serial reference path");
}

}  // namespace

std::vector<std::size_t> parse_k_list(std::string_view text) {
  const auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
      throw ConfigError("invalid k value '" + std::string(s) + "' in '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<std::size_t> ks;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    if (const std::size_t dots = item.find(".."); dots != std::string_view::npos) {
      const std::size_t lo = number(item.substr(0, dots));
      const std::size_t hi = number(item.substr(dots + 2));
      if (lo > hi) throw ConfigError("empty k range '" + std::string(item) + "'");
      for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
    } else {
      ks.push_back(number(item));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return ks;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  std::size_t oracle_arms = 50;

  CLI::App app{"Greedy Bandits with Sampled Context on the UCI Mushroom environment", "gbsc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GBSC_VERSION);

  CLI::App* train_cmd = app.add_subcommand("train", "Train one model; write its regret curve and posteriors");
  add_data_options(*train_cmd, o);
  train_cmd->add_option("--k", o.k, "Top-confidence count")->capture_default_str();
  add_training_options(*train_cmd, o);
  train_cmd->add_option("--replicates", o.eval_replicates, "Evaluation episodes per curve point (alias)");
  add_output_options(*train_cmd, o);

  CLI::App* sweep_cmd = app.add_subcommand("sweep-k", "Final cumulative regret across k values");
  add_data_options(*sweep_cmd, o);
  sweep_cmd->add_option("--ks", o.ks, "k values, e.g. 1..22 or 1,2,3")->capture_default_str();
  sweep_cmd->add_option("--replicates", o.replicates, "Independent pipelines per k")->capture_default_str();
  add_training_options(*sweep_cmd, o);
  add_output_options(*sweep_cmd, o);

  CLI::App* importance_cmd = app.add_subcommand("importance", "Utilization counts and learned posteriors");
  add_data_options(*importance_cmd, o);
  importance_cmd->add_option("--k", o.k, "Top-confidence count")->capture_default_str();
  importance_cmd->add_option("--replicates", o.replicates, "Independently trained models")->capture_default_str();
  add_training_options(*importance_cmd, o);
  add_output_options(*importance_cmd, o);

  CLI::App* mask_cmd = app.add_subcommand("mask", "Regret change when context subsets are hidden");
  add_data_options(*mask_cmd, o);
  mask_cmd->add_option("--mode", o.mode, "Masking scheme")
      ->check(CLI::IsMember({"random", "priority"}))
      ->capture_default_str();
  mask_cmd->add_option("--rate", o.rate, "Masking rate in [0, 1]")->capture_default_str();
  mask_cmd->add_option("--utilization", o.utilization, "utilization.csv from `importance` (priority mode)");
  mask_cmd->add_option("--k", o.k, "Top-confidence count")->capture_default_str();
  mask_cmd->add_option("--replicates", o.replicates, "Independently trained models")->capture_default_str();
  add_training_options(*mask_cmd, o);
  add_output_options(*mask_cmd, o);

  CLI::App* oracle_cmd = app.add_subcommand("oracle-check", "Gap between the oracle and the legacy oracle");
  add_data_options(*oracle_cmd, o);
  oracle_cmd->add_option("--replicates", o.replicates, "Replicates (default 100)");
  oracle_cmd->add_option("--arms,--eval-arms", oracle_arms, "Arms per replicate")->capture_default_str();
  oracle_cmd->add_option("--tolerance", o.tolerance, "Allowed |mean - analytic| (default: 3 standard errors)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (*train_cmd) return cmd_train(o, out);
    if (*sweep_cmd) return cmd_sweep_k(o, out, err);
    if (*importance_cmd) return cmd_importance(o, out);
    if (*mask_cmd) return cmd_mask(o, out);
    if (*oracle_cmd) {
      if (oracle_cmd->count("--replicates") == 0) o.replicates = 100;
      return cmd_oracle_check(o, oracle_arms, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsageError;
}

}  // namespace gbsc::cli
