#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tune/dataset.hpp"
#include "tune/evaluation.hpp"
#include "tune/optimize.hpp"
#include "tune/search_space.hpp"
#include "tune/strategy.hpp"

namespace tune {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON mappings

inline json value_to_json(const Value& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  return std::get<double>(v);
}

inline json config_to_json(const Configuration& config) {
  json out = json::object();
  for (const auto& [name, value] : config.items()) out[name] = value_to_json(value);
  return out;
}

//! Rebuilds a configuration in the order of `space`.
inline Configuration config_from_json(const json& doc, const SearchSpace& space) {
  std::vector<std::pair<std::string, Value>> values;
  for (const auto& p : space.params()) {
    const json& v = doc.at(p.name);
    if (v.is_string())
      values.emplace_back(p.name, v.get<std::string>());
    else if (v.is_number_integer())
      values.emplace_back(p.name, v.get<std::int64_t>());
    else
      values.emplace_back(p.name, v.get<double>());
  }
  return Configuration(std::move(values));
}

inline json trial_to_json(const Trial& t) {
  return json{{"index", t.index},
              {"config", config_to_json(t.config)},
              {"score", t.score},
              {"wall_time_seconds", t.wall_time_seconds}};
}

inline json report_to_json(const EvaluationReport& r) {
  json per_class = json::object();
  for (const auto& [label, m] : r.per_class)
    per_class[label] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  json matrix = json::array();
  std::size_t c = r.confusion.labels.size();
  for (std::size_t i = 0; i < c; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < c; ++j) row.push_back(r.confusion.at(i, j));
    matrix.push_back(std::move(row));
  }
  return json{{"accuracy", r.accuracy},
              {"per_class", per_class},
              {"confusion", {{"labels", r.confusion.labels}, {"matrix", matrix}}},
              {"wall_time_seconds", r.wall_time_seconds}};
}

inline EvaluationReport report_from_json(const json& doc) {
  EvaluationReport r;
  r.accuracy = doc.at("accuracy").get<double>();
  for (const auto& [label, m] : doc.at("per_class").items())
    r.per_class[label] = ClassMetrics{m.at("precision").get<double>(),
                                      m.at("recall").get<double>(), m.at("f1").get<double>()};
  r.confusion.labels = doc.at("confusion").at("labels").get<std::vector<std::string>>();
  for (const auto& row : doc.at("confusion").at("matrix"))
    for (const auto& cell : row) r.confusion.cells.push_back(cell.get<std::int64_t>());
  r.wall_time_seconds = doc.at("wall_time_seconds").get<double>();
  return r;
}

// ---------------------------------------------------------------------------
// Experiment configuration

struct StrategySpec {
  std::string name;
  SearchSpace space;
  std::optional<std::size_t> budget;
  StrategyOptions options;
};

struct ExperimentConfig {
  std::string dataset_path;
  DatasetSchema schema;
  std::optional<std::size_t> subsample;
  double test_fraction = 0.2;
  std::size_t cv_folds = 5;
  std::size_t repetitions = 15;
  std::uint64_t seed = 42;
  std::vector<StrategySpec> strategies;
};

inline SearchSpace space_from_json(const json& doc) {
  SearchSpace space;
  for (const auto& entry : doc) {
    std::string name = entry.at("name").get<std::string>();
    std::string kind = entry.at("kind").get<std::string>();
    if (kind == "categorical") {
      space.add(name, Categorical{entry.at("values").get<std::vector<std::string>>()});
    } else if (kind == "int") {
      space.add(name, IntegerRange{entry.at("lo").get<std::int64_t>(),
                                   entry.at("hi").get<std::int64_t>()});
    } else if (kind == "float") {
      Sampling sampling = Sampling::uniform;
      if (entry.contains("sampling")) {
        std::string s = entry.at("sampling").get<std::string>();
        if (s == "log_uniform")
          sampling = Sampling::log_uniform;
        else if (s != "uniform")
          fail(errc::bad_config, "unknown sampling '" + s + "'");
      }
      space.add(name,
                ContinuousRange{entry.at("lo").get<double>(), entry.at("hi").get<double>(), sampling});
    } else if (kind == "values") {
      space.add(name, DiscreteValues{entry.at("values").get<std::vector<double>>()});
    } else {
      fail(errc::bad_config, "unknown domain kind '" + kind + "' for '" + name + "'");
    }
  }
  space.validate();
  return space;
}

inline ExperimentConfig experiment_config_from_json(const json& doc) {
  ExperimentConfig config;
  const json& dataset = doc.at("dataset");
  config.dataset_path = dataset.at("path").get<std::string>();
  const json& schema = dataset.at("schema");
  config.schema.label_column = schema.at("label_column").get<std::string>();
  config.schema.positive_label = schema.at("positive_label").get<std::string>();
  config.schema.negative_label = schema.at("negative_label").get<std::string>();
  config.schema.feature_columns = schema.at("feature_columns").get<std::vector<std::string>>();
  if (schema.contains("rows_expected") && !schema.at("rows_expected").is_null())
    config.schema.rows_expected = schema.at("rows_expected").get<std::size_t>();

  if (doc.contains("subsample") && !doc.at("subsample").is_null())
    config.subsample = doc.at("subsample").get<std::size_t>();
  if (doc.contains("test_fraction")) config.test_fraction = doc.at("test_fraction").get<double>();
  if (doc.contains("cv_folds")) config.cv_folds = doc.at("cv_folds").get<std::size_t>();
  if (doc.contains("repetitions")) config.repetitions = doc.at("repetitions").get<std::size_t>();
  if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();

  for (const json& s : doc.at("strategies")) {
    StrategySpec spec;
    spec.name = s.at("name").get<std::string>();
    spec.space = space_from_json(s.at("space"));
    if (s.contains("budget") && !s.at("budget").is_null())
      spec.budget = s.at("budget").get<std::size_t>();
    if (s.contains("params")) {
      const json& p = s.at("params");
      if (spec.name == "ga") {
        auto& ga = spec.options.ga;
        if (p.contains("population_size")) ga.population_size = p.at("population_size");
        if (p.contains("generations")) ga.generations = p.at("generations");
        if (p.contains("crossover_prob")) ga.crossover_prob = p.at("crossover_prob");
        if (p.contains("mutation_prob")) ga.mutation_prob = p.at("mutation_prob");
        if (p.contains("tournament_size")) ga.tournament_size = p.at("tournament_size");
      } else if (spec.name == "pso") {
        auto& pso = spec.options.pso;
        if (p.contains("swarm_size")) pso.swarm_size = p.at("swarm_size");
        if (p.contains("generations")) pso.generations = p.at("generations");
        if (p.contains("phi1")) pso.phi1 = p.at("phi1");
        if (p.contains("phi2")) pso.phi2 = p.at("phi2");
      } else if (spec.name == "bayes") {
        auto& bayes = spec.options.bayes;
        if (p.contains("init_points")) bayes.init_points = p.at("init_points");
        if (p.contains("candidates")) bayes.candidates = p.at("candidates");
      }
    }
    config.strategies.push_back(std::move(spec));
  }

  std::set<std::string> names;
  for (const auto& s : config.strategies) {
    if (!names.insert(s.name).second)
      fail(errc::bad_config, "duplicate strategy '" + s.name + "'");
    if (s.name == "grid") {
      for (const auto& p : s.space.params())
        if (!std::holds_alternative<Categorical>(p.domain) &&
            !std::holds_alternative<DiscreteValues>(p.domain))
          fail(errc::bad_config, "grid strategy requires finite axes ('" + p.name + "')");
    } else if (s.name == "random" || s.name == "bayes") {
      if (!s.budget) fail(errc::bad_config, "strategy '" + s.name + "' requires a budget");
    } else if (s.name != "ga" && s.name != "pso") {
      fail(errc::unknown_strategy, "unknown strategy '" + s.name + "'");
    }
  }
  return config;
}

//! Loads the config file; a relative dataset path is resolved against the
//! config file's directory.
inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(errc::bad_config, "config '" + path + "': " + e.what());
  }
  ExperimentConfig config = experiment_config_from_json(doc);
  std::filesystem::path dataset(config.dataset_path);
  if (dataset.is_relative())
    config.dataset_path = (std::filesystem::path(path).parent_path() / dataset).string();
  return config;
}

// ---------------------------------------------------------------------------
// Campaign

struct RepetitionRecord {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  Configuration best_config;
  double best_cv_score = 0.0;
  std::size_t trial_count = 0;
  EvaluationReport test_report;
  double train_accuracy = 0.0;
  double search_wall_seconds = 0.0;
};

struct StrategyCampaign {
  std::string name;
  std::optional<std::size_t> budget;
  std::vector<RepetitionRecord> repetitions;

  double mean_test_accuracy() const {
    double acc = 0.0;
    for (const auto& r : repetitions) acc += r.test_report.accuracy;
    return acc / static_cast<double>(repetitions.size());
  }
  double mean_train_accuracy() const {
    double acc = 0.0;
    for (const auto& r : repetitions) acc += r.train_accuracy;
    return acc / static_cast<double>(repetitions.size());
  }
  double total_cpu_seconds() const {
    double acc = 0.0;
    for (const auto& r : repetitions) acc += r.search_wall_seconds;
    return acc;
  }

  //! Repetition with the highest test accuracy; ties go to the lowest index.
  const RepetitionRecord& best_run() const {
    const RepetitionRecord* best = &repetitions.front();
    for (const auto& r : repetitions)
      if (r.test_report.accuracy > best->test_report.accuracy) best = &r;
    return *best;
  }
};

struct CampaignResult {
  std::string dataset_path;
  std::size_t rows = 0;
  std::size_t features = 0;
  std::map<std::string, std::size_t> class_counts;
  double test_fraction = 0.2;
  std::size_t cv_folds = 5;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> subsample;
  std::vector<StrategyCampaign> strategies;
};

inline json repetition_to_json(const RepetitionRecord& r) {
  return json{{"repetition", r.repetition},
              {"seed", r.seed},
              {"best_config", config_to_json(r.best_config)},
              {"best_cv_score", r.best_cv_score},
              {"trial_count", r.trial_count},
              {"test_report", report_to_json(r.test_report)},
              {"train_accuracy", r.train_accuracy},
              {"search_wall_seconds", r.search_wall_seconds}};
}

inline RepetitionRecord repetition_from_json(const json& doc, const SearchSpace& space) {
  RepetitionRecord r;
  r.repetition = doc.at("repetition").get<std::size_t>();
  r.seed = doc.at("seed").get<std::uint64_t>();
  r.best_config = config_from_json(doc.at("best_config"), space);
  r.best_cv_score = doc.at("best_cv_score").get<double>();
  r.trial_count = doc.at("trial_count").get<std::size_t>();
  r.test_report = report_from_json(doc.at("test_report"));
  r.train_accuracy = doc.at("train_accuracy").get<double>();
  r.search_wall_seconds = doc.at("search_wall_seconds").get<double>();
  return r;
}

inline json campaign_to_json(const CampaignResult& campaign) {
  json strategies = json::object();
  for (const auto& s : campaign.strategies) {
    json reps = json::array();
    for (const auto& r : s.repetitions) reps.push_back(repetition_to_json(r));
    json entry = {{"repetitions", std::move(reps)},
                  {"mean_test_accuracy", s.mean_test_accuracy()},
                  {"mean_train_accuracy", s.mean_train_accuracy()},
                  {"total_cpu_seconds", s.total_cpu_seconds()}};
    if (s.budget) entry["budget"] = *s.budget;
    strategies[s.name] = std::move(entry);
  }
  json counts = json::object();
  for (const auto& [label, n] : campaign.class_counts) counts[label] = n;
  json doc = {{"dataset",
               {{"path", campaign.dataset_path},
                {"rows", campaign.rows},
                {"features", campaign.features},
                {"class_counts", counts}}},
              {"experiment",
               {{"test_fraction", campaign.test_fraction},
                {"cv_folds", campaign.cv_folds},
                {"repetitions", campaign.repetitions},
                {"seed", campaign.seed}}},
              {"strategies", strategies}};
  if (campaign.subsample) doc["experiment"]["subsample"] = *campaign.subsample;
  return doc;
}

//! Rebuild a campaign from summary.json. Spaces are needed to type the
//! persisted best configurations; pass the specs from the same config file.
inline CampaignResult campaign_from_json(const json& doc,
                                         const std::vector<StrategySpec>& specs) {
  CampaignResult campaign;
  campaign.dataset_path = doc.at("dataset").at("path").get<std::string>();
  campaign.rows = doc.at("dataset").at("rows").get<std::size_t>();
  campaign.features = doc.at("dataset").at("features").get<std::size_t>();
  for (const auto& [label, n] : doc.at("dataset").at("class_counts").items())
    campaign.class_counts[label] = n.get<std::size_t>();
  const json& exp = doc.at("experiment");
  campaign.test_fraction = exp.at("test_fraction").get<double>();
  campaign.cv_folds = exp.at("cv_folds").get<std::size_t>();
  campaign.repetitions = exp.at("repetitions").get<std::size_t>();
  campaign.seed = exp.at("seed").get<std::uint64_t>();
  if (exp.contains("subsample")) campaign.subsample = exp.at("subsample").get<std::size_t>();

  for (const auto& spec : specs) {
    if (!doc.at("strategies").contains(spec.name)) continue;
    const json& entry = doc.at("strategies").at(spec.name);
    StrategyCampaign s;
    s.name = spec.name;
    if (entry.contains("budget")) s.budget = entry.at("budget").get<std::size_t>();
    for (const auto& r : entry.at("repetitions"))
      s.repetitions.push_back(repetition_from_json(r, spec.space));
    campaign.strategies.push_back(std::move(s));
  }
  return campaign;
}

// ---------------------------------------------------------------------------
// Reports

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

} // namespace detail

struct RenderedReport {
  json machine;
  std::string markdown;
};

//! Table of best-run per-class precision/recall/f1 (2 decimals) plus the
//! per-strategy mean accuracy summary (4 decimals), as JSON and Markdown.
inline RenderedReport render_report(const CampaignResult& campaign) {
  if (campaign.strategies.empty() ||
      std::all_of(campaign.strategies.begin(), campaign.strategies.end(),
                  [](const StrategyCampaign& s) { return s.repetitions.empty(); }))
    fail(errc::empty_input, "campaign has no results to report");

  std::vector<const StrategyCampaign*> ordered;
  for (const auto& s : campaign.strategies)
    if (!s.repetitions.empty()) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const StrategyCampaign* a, const StrategyCampaign* b) { return a->name < b->name; });

  RenderedReport out;
  json performance = json::object();
  json summary = json::object();

  std::string md;
  md += "# Experiment report\n\n";
  md += "Dataset: `" + campaign.dataset_path + "` (" + std::to_string(campaign.rows) +
        " rows, " + std::to_string(campaign.features) + " features)\n\n";
  md += "Classes:";
  for (const auto& [label, n] : campaign.class_counts)
    md += " " + label + "=" + std::to_string(n);
  md += "\n\nRepetitions: " + std::to_string(campaign.repetitions) +
        ", CV folds: " + std::to_string(campaign.cv_folds) +
        ", test fraction: " + detail::fixed(campaign.test_fraction, 2) +
        ", seed: " + std::to_string(campaign.seed) + "\n\n";

  md += "## Best-run class performance\n\n";
  md += "| Algorithm | Classes | Precision | Recall | F1-score |\n";
  md += "|---|---|---|---|---|\n";
  for (const auto* s : ordered) {
    const RepetitionRecord& best = s->best_run();
    json classes = json::object();
    for (const auto& [label, m] : best.test_report.per_class) {
      md += "| " + s->name + " | " + label + " | " + detail::fixed(m.precision, 2) + " | " +
            detail::fixed(m.recall, 2) + " | " + detail::fixed(m.f1, 2) + " |\n";
      classes[label] = {{"precision", detail::fixed(m.precision, 2)},
                        {"recall", detail::fixed(m.recall, 2)},
                        {"f1", detail::fixed(m.f1, 2)}};
    }
    performance[s->name] = {{"best_repetition", best.repetition}, {"classes", classes}};
  }

  md += "\n## Strategy summary\n\n";
  md += "| Algorithm | Test Accuracy | Train Accuracy | CPU Time |\n";
  md += "|---|---|---|---|\n";
  for (const auto* s : ordered) {
    md += "| " + s->name + " | " + detail::fixed(s->mean_test_accuracy(), 4) + " | " +
          detail::fixed(s->mean_train_accuracy(), 4) + " | " +
          detail::fixed(s->total_cpu_seconds(), 2) + " |\n";
    summary[s->name] = {{"test_accuracy", detail::fixed(s->mean_test_accuracy(), 4)},
                        {"train_accuracy", detail::fixed(s->mean_train_accuracy(), 4)},
                        {"cpu_time_seconds", detail::fixed(s->total_cpu_seconds(), 2)}};
  }

  out.machine = {{"performance", performance}, {"summary", summary}};
  out.markdown = std::move(md);
  return out;
}

// ---------------------------------------------------------------------------
// Runner

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(errc::io_error, "cannot write '" + tmp.string() + "'");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

} // namespace detail

//! Runs the full strategy x repetition campaign described by the config.
//! Everything is persisted incrementally under out_dir; a rerun resumes at
//! repetition granularity from the persisted result files.
inline CampaignResult run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                     bool verbose = true) {
  namespace fs = std::filesystem;
  RandomStream root(config.seed);

  LabeledDataset full = load_csv(config.dataset_path, config.schema);
  if (config.subsample && *config.subsample < full.n_rows)
    full = subsample_stratified(full, *config.subsample, root.substream("subsample").seed());

  HoldoutSplit holdout =
      stratified_holdout(full, config.test_fraction, root.substream("holdout").seed());
  LabeledDataset train_split = full.take_rows(holdout.train_indices);
  LabeledDataset test_split = full.take_rows(holdout.test_indices);

  if (verbose)
    std::cerr << "dataset: " << full.n_rows << " rows -> train " << train_split.n_rows
              << " / test " << test_split.n_rows << "\n";

  CampaignResult campaign;
  campaign.dataset_path = config.dataset_path;
  campaign.rows = full.n_rows;
  campaign.features = full.n_features;
  campaign.class_counts = full.class_counts();
  campaign.test_fraction = config.test_fraction;
  campaign.cv_folds = config.cv_folds;
  campaign.repetitions = config.repetitions;
  campaign.seed = config.seed;
  campaign.subsample = config.subsample;

  for (const auto& spec : config.strategies) {
    StrategyCampaign strategy_campaign;
    strategy_campaign.name = spec.name;
    strategy_campaign.budget = spec.budget;

    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
      fs::path rep_dir = fs::path(out_dir) / "results" / spec.name / std::to_string(rep);
      fs::create_directories(rep_dir);
      fs::path result_path = rep_dir / "result.json";

      if (fs::exists(result_path)) {
        std::ifstream in(result_path);
        json doc = json::parse(in);
        strategy_campaign.repetitions.push_back(repetition_from_json(doc, spec.space));
        if (verbose) std::cerr << spec.name << " rep " << rep << ": resumed\n";
        continue;
      }

      std::uint64_t strategy_seed = root.substream("strategy:" + spec.name, rep).seed();
      CvObjective objective(train_split, config.cv_folds, root.substream("cv", rep).seed());

      std::ofstream trials_out(rep_dir / "trials.jsonl", std::ios::trunc);
      TrialSink sink = [&trials_out](const Trial& t) {
        trials_out << trial_to_json(t).dump() << "\n";
        trials_out.flush();
      };

      auto search_start = std::chrono::steady_clock::now();
      StrategyResult result = run_strategy(
          spec.name, spec.space, [&objective](const Configuration& c) { return objective(c); },
          spec.budget, strategy_seed, spec.options, sink);
      std::chrono::duration<double> search_elapsed =
          std::chrono::steady_clock::now() - search_start;

      // retrain on the full training split with the incumbent and score the
      // held-out test set that no CV fold ever saw
      auto eval_start = std::chrono::steady_clock::now();
      RFHyperParams hp = rf_params_from(result.best_config);
      NormalizationModel norm = minmax_fit(train_split);
      LabeledDataset train_norm = minmax_apply(norm, train_split);
      LabeledDataset test_norm = minmax_apply(norm, test_split);
      ForestModel model =
          train_forest(train_norm, hp, root.substream("final:" + spec.name, rep).seed());
      std::vector<std::string> test_pred = predict_batch(model, test_norm);
      std::vector<std::string> train_pred = predict_batch(model, train_norm);
      EvaluationReport test_report = compute_metrics(test_split.labels, test_pred);
      std::chrono::duration<double> eval_elapsed = std::chrono::steady_clock::now() - eval_start;
      test_report.wall_time_seconds = eval_elapsed.count();

      RepetitionRecord record;
      record.repetition = rep;
      record.seed = strategy_seed;
      record.best_config = result.best_config;
      record.best_cv_score = result.best_score;
      record.trial_count = result.history.size();
      record.test_report = test_report;
      record.train_accuracy = accuracy_score(train_split.labels, train_pred);
      record.search_wall_seconds = search_elapsed.count();

      detail::write_text_file(result_path, repetition_to_json(record).dump(2) + "\n");
      if (verbose)
        std::cerr << spec.name << " rep " << rep << ": trials=" << record.trial_count
                  << " cv=" << detail::fixed(record.best_cv_score, 4)
                  << " test=" << detail::fixed(record.test_report.accuracy, 4) << " ("
                  << detail::fixed(record.search_wall_seconds, 1) << "s)\n";
      strategy_campaign.repetitions.push_back(std::move(record));
    }
    campaign.strategies.push_back(std::move(strategy_campaign));
  }

  detail::write_text_file(fs::path(out_dir) / "summary.json",
                          campaign_to_json(campaign).dump(2) + "\n");
  RenderedReport report = render_report(campaign);
  detail::write_text_file(fs::path(out_dir) / "report.md", report.markdown);
  detail::write_text_file(fs::path(out_dir) / "report.json", report.machine.dump(2) + "\n");
  return campaign;
}

} // namespace tune
