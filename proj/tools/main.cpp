// simconf: consistency-based confidence estimation for LLM generations.
//
// Subcommands cover the three pipeline phases (sample, similarity,
// aggregate/evaluate) plus corpus utilities, composable through files so
// each phase is independently testable. Exit codes: 0 success, 2 usage
// error, 3 data/validation error, 4 numeric error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "json_config.hpp"
#include "simconf/aggregate.hpp"
#include "simconf/corpus.hpp"
#include "simconf/error.hpp"
#include "simconf/evaluate.hpp"
#include "simconf/parallel.hpp"
#include "simconf/pipeline.hpp"
#include "simconf/reward.hpp"
#include "simconf/sampler.hpp"
#include "simconf/similarity.hpp"
#include "simconf/simulate.hpp"

namespace {

using simconf::DataError;
using simconf::UsageError;
using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

// scores.jsonl -> scores.r2.jsonl for repeat 2 (single runs keep the path).
std::string repeat_path(const std::string& path, int repeat, int repeats) {
  if (repeats <= 1) return path;
  const std::size_t dot = path.find_last_of('.');
  const std::string suffix = ".r" + std::to_string(repeat);
  if (dot == std::string::npos || dot == 0) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

struct QueryTask {
  std::string query_id;
  std::string query;
  std::vector<std::string> references;
  std::string context;
};

std::vector<QueryTask> read_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open queries file: " + path);
  std::vector<QueryTask> tasks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    try {
      const Json j = Json::parse(line);
      QueryTask task;
      task.query_id = j.at("query_id").get<std::string>();
      task.query = j.at("query").get<std::string>();
      if (j.contains("references"))
        task.references = j["references"].get<std::vector<std::string>>();
      task.context = j.value("context", std::string{});
      tasks.push_back(std::move(task));
    } catch (const Json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  if (tasks.empty()) throw DataError("queries file is empty: " + path);
  return tasks;
}

// ---------------------------------------------------------------------------
// Subcommand options
// ---------------------------------------------------------------------------

struct SimilarityOpts {
  std::string corpus;
  std::string metric = "jaccard";
  std::string out;
  unsigned jobs = 1;
};

struct RewardOpts {
  std::string corpus;
  std::string out;
  double threshold = -1.0;  // <0 means "default for the task label"
  bool overwrite = false;
};

struct SimulateOpts {
  std::string scenario_file;
  std::size_t groups = 100;
  std::size_t m = 10;
  double correct_rate = 0.5;
  std::vector<double> sim_correct = {8.0, 2.0};
  std::vector<double> sim_incorrect = {2.0, 8.0};
  std::uint64_t seed = 0;
  std::string out;
  std::string matrices_out;
};

struct RunOpts {
  std::string corpus;
  std::string matrices;
  std::string method;
  std::string metric = "jaccard";
  double fraction = 0.5;
  std::uint64_t seed = 0;
  int repeats = 1;
  std::string learner = "rf";
  int trees = 100;
  int max_depth = 4;
  int min_leaf = 1;
  double l2 = 1e-3;
  double step = 0.1;
  int max_iters = 5000;
  bool sorted_features = false;
  unsigned jobs = 1;
  std::size_t bins = simconf::kDefaultBinCount;
  std::string scores_out;
  std::string report_out;
  std::string model_out;
  std::string per_temperature_out;
  bool table = false;
};

struct ReportOpts {
  std::string corpus;
  std::string scores;
  std::string method = "external";
  std::size_t bins = simconf::kDefaultBinCount;
  std::string out;
  std::string csv;
  std::string per_temperature_out;
  bool table = false;
};

struct SampleOpts {
  std::string queries;
  std::string out;
  std::string corpus;  // p(true) mode input
  bool p_true = false;
  std::string context;
  std::string task_label = "other";
  std::string prompt_template = "{query}";
  std::string prompt_template_file;
  std::string record;
  std::string replay;
  unsigned jobs = 1;
  simconf::EndpointConfig endpoint;
  std::string api_key_env;
  simconf::SamplingPlan plan;
};

// ---------------------------------------------------------------------------
// Subcommand actions
// ---------------------------------------------------------------------------

void cmd_similarity(const SimilarityOpts& opts) {
  if (!simconf::is_known_metric(opts.metric))
    throw UsageError("unknown similarity metric '" + opts.metric + "'");
  const simconf::Corpus corpus = simconf::load_corpus(opts.corpus);
  if (corpus.groups.empty()) throw DataError("corpus has no groups");

  std::vector<simconf::SimilarityMatrix> per_group(corpus.groups.size());
  simconf::parallel_for(corpus.groups.size(), opts.jobs, [&](std::size_t g) {
    per_group[g] = simconf::similarity_matrix(corpus.groups[g], opts.metric);
  });
  std::map<std::string, simconf::SimilarityMatrix> matrices;
  for (std::size_t g = 0; g < corpus.groups.size(); ++g)
    matrices.emplace(corpus.groups[g].query_id, std::move(per_group[g]));
  simconf::save_matrices(matrices, opts.out);
  std::cout << "wrote " << matrices.size() << " matrices (" << opts.metric
            << ") to " << opts.out << '\n';
}

void cmd_reward(const RewardOpts& opts) {
  const simconf::Corpus corpus = simconf::load_corpus(opts.corpus);
  simconf::RewardConfig config;
  config.threshold = opts.threshold >= 0.0
                         ? opts.threshold
                         : simconf::default_reward_threshold(corpus.task_label);
  const simconf::AttachReport report =
      simconf::attach_rewards(corpus, config, opts.overwrite);
  simconf::save_corpus(report.corpus, opts.out);
  std::cout << "labeled " << report.labeled << " samples (threshold "
            << config.threshold << "), " << report.unlabeled
            << " left unlabeled";
  if (!report.unlabeled_group_ids.empty())
    std::cout << " across " << report.unlabeled_group_ids.size() << " groups";
  std::cout << '\n';
}

void cmd_simulate(const SimulateOpts& opts) {
  simconf::ScenarioConfig config;
  if (!opts.scenario_file.empty()) {
    config = simconf::scenario_from_json(read_file(opts.scenario_file));
  } else {
    if (opts.sim_correct.size() != 2 || opts.sim_incorrect.size() != 2)
      throw UsageError("--sim-correct/--sim-incorrect take exactly 2 values");
    config.group_count = opts.groups;
    config.m = opts.m;
    config.correct_rate = opts.correct_rate;
    config.sim_correct_a = opts.sim_correct[0];
    config.sim_correct_b = opts.sim_correct[1];
    config.sim_incorrect_a = opts.sim_incorrect[0];
    config.sim_incorrect_b = opts.sim_incorrect[1];
    config.seed = opts.seed;
  }
  const simconf::Scenario scenario = simconf::generate_scenario(config);
  simconf::save_corpus(scenario.corpus, opts.out);
  if (!opts.matrices_out.empty())
    simconf::save_matrices(scenario.matrices, opts.matrices_out);
  std::cout << "simulated " << scenario.corpus.groups.size() << " groups (m="
            << config.m << ") to " << opts.out << '\n';
}

void cmd_run(const RunOpts& opts) {
  if (!simconf::is_known_method(opts.method))
    throw UsageError("unknown method '" + opts.method + "'; expected one of " +
                     [] {
                       std::string all;
                       for (const auto& name : simconf::known_methods())
                         all += all.empty() ? name : (", " + name);
                       return all;
                     }());
  if (!simconf::is_known_metric(opts.metric))
    throw UsageError("unknown similarity metric '" + opts.metric + "'");

  const simconf::Corpus corpus = simconf::load_corpus(opts.corpus);
  std::optional<std::map<std::string, simconf::SimilarityMatrix>> matrices;
  if (!opts.matrices.empty()) matrices = simconf::load_matrices(opts.matrices);

  simconf::RunConfig config;
  config.method = opts.method;
  config.metric = opts.metric;
  config.split_fraction = opts.fraction;
  config.seed = opts.seed;
  config.repeats = opts.repeats;
  config.learner = opts.learner;
  config.forest.tree_count = opts.trees;
  config.forest.max_depth = opts.max_depth;
  config.forest.min_leaf = opts.min_leaf;
  config.logistic.l2 = opts.l2;
  config.logistic.step = opts.step;
  config.logistic.max_iters = opts.max_iters;
  config.sorted_features = opts.sorted_features;
  config.jobs = opts.jobs;
  config.bin_count = opts.bins;

  const simconf::RunSummary summary = simconf::run_pipeline(
      corpus, matrices ? &*matrices : nullptr, config);

  for (int k = 0; k < opts.repeats; ++k) {
    const simconf::RunOutput& run = summary.runs[static_cast<std::size_t>(k)];
    if (!opts.scores_out.empty())
      simconf::write_scores(repeat_path(opts.scores_out, k, opts.repeats),
                            run.scores);
    if (!opts.model_out.empty() && !run.model_json.empty())
      write_file(repeat_path(opts.model_out, k, opts.repeats), run.model_json);
    if (!opts.per_temperature_out.empty())
      write_file(repeat_path(opts.per_temperature_out, k, opts.repeats),
                 simconf::per_temperature_json(run.scored, opts.bins));
    if (opts.table)
      std::cout << simconf::report_table(run.report) << '\n';
  }
  if (!opts.model_out.empty() && summary.runs.front().model_json.empty())
    std::cerr << "note: " << opts.method
              << " fits no model; --model-out not written\n";

  if (!opts.report_out.empty())
    write_file(opts.report_out, summary.report_json);
  else if (!opts.table)
    std::cout << summary.report_json << '\n';
}

void cmd_report(const ReportOpts& opts) {
  const simconf::Corpus corpus = simconf::load_corpus(opts.corpus);
  const std::vector<simconf::ScoreRecord> scores =
      simconf::load_scores(opts.scores);
  if (scores.empty()) throw DataError("scores file is empty: " + opts.scores);
  const std::vector<simconf::ScoredGroup> scored =
      simconf::join_scores(corpus, scores);
  const simconf::EvaluationReport report =
      simconf::make_report(opts.method, scored, opts.bins);

  if (!opts.csv.empty()) write_file(opts.csv, simconf::bins_csv(report));
  if (!opts.per_temperature_out.empty())
    write_file(opts.per_temperature_out,
               simconf::per_temperature_json(scored, opts.bins));
  if (opts.table) std::cout << simconf::report_table(report) << '\n';
  if (!opts.out.empty())
    write_file(opts.out, simconf::report_to_json(report));
  else if (!opts.table)
    std::cout << simconf::report_to_json(report) << '\n';
}

std::unique_ptr<simconf::Transport> make_transport(const SampleOpts& opts) {
  std::unique_ptr<simconf::Transport> transport;
  if (!opts.replay.empty())
    transport = std::make_unique<simconf::ReplayTransport>(opts.replay);
  else
    transport = simconf::make_http_transport(opts.endpoint);
  if (!opts.record.empty())
    transport = std::make_unique<simconf::RecordingTransport>(
        std::move(transport), opts.record);
  return transport;
}

void cmd_sample(SampleOpts opts) {
  if (!opts.api_key_env.empty()) {
    const char* key = std::getenv(opts.api_key_env.c_str());
    if (key != nullptr) opts.endpoint.api_key = key;
  }
  if (!opts.prompt_template_file.empty())
    opts.prompt_template = read_file(opts.prompt_template_file);

  simconf::CompletionClient client(opts.endpoint, make_transport(opts));

  if (opts.p_true) {
    if (opts.corpus.empty())
      throw UsageError("--p-true needs --corpus with generations to judge");
    const simconf::Corpus corpus = simconf::load_corpus(opts.corpus);
    std::vector<std::vector<simconf::ScoreRecord>> per_group(
        corpus.groups.size());
    std::vector<std::vector<std::string>> warnings(corpus.groups.size());
    simconf::parallel_for(corpus.groups.size(), opts.jobs, [&](std::size_t g) {
      const simconf::QueryGroup& group = corpus.groups[g];
      for (const simconf::Sample& sample : group.samples) {
        if (!sample.eval_flag) continue;
        try {
          const double confidence =
              client.p_true_score(group.query, sample.text, opts.context);
          per_group[g].push_back({group.query_id, sample.sample_index,
                                  sample.temperature, confidence});
        } catch (const DataError& e) {
          warnings[g].push_back("group '" + group.query_id + "': " + e.what() +
                                " (sample left unscored)");
        }
      }
    });
    std::vector<simconf::ScoreRecord> scores;
    for (auto& g : per_group)
      scores.insert(scores.end(), g.begin(), g.end());
    for (const auto& g : warnings)
      for (const std::string& w : g) std::cerr << "warning: " << w << '\n';
    simconf::write_scores(opts.out, scores);
    std::cout << "scored " << scores.size() << " samples with p(true) to "
              << opts.out << '\n';
    return;
  }

  if (opts.queries.empty())
    throw UsageError("sample needs --queries (or --p-true with --corpus)");
  simconf::validate_plan(opts.plan);
  const std::vector<QueryTask> tasks = read_queries(opts.queries);

  std::vector<simconf::QueryGroup> groups(tasks.size());
  std::vector<std::vector<std::string>> warnings(tasks.size());
  simconf::parallel_for(tasks.size(), opts.jobs, [&](std::size_t q) {
    const QueryTask& task = tasks[q];
    const simconf::SampleBatch batch = client.sample_generations(
        opts.plan, task.query, opts.prompt_template);
    simconf::QueryGroup group;
    group.query_id = task.query_id;
    group.query = task.query;
    group.references = task.references;
    group.samples = batch.samples;
    simconf::canonicalize_samples(group);
    simconf::validate_group(group, "query '" + task.query_id + "'");
    groups[q] = std::move(group);
    warnings[q] = batch.warnings;
  });

  simconf::Corpus corpus;
  corpus.task_label = opts.task_label;
  corpus.groups = std::move(groups);
  for (std::size_t q = 0; q < warnings.size(); ++q)
    for (const std::string& w : warnings[q])
      std::cerr << "warning: query '" << tasks[q].query_id << "': " << w
                << '\n';
  simconf::save_corpus(corpus, opts.out);
  std::cout << "sampled " << corpus.groups.size() << " groups to " << opts.out
            << '\n';
}

// ---------------------------------------------------------------------------
// Wiring
// ---------------------------------------------------------------------------

int run_cli(int argc, char** argv) {
  CLI::App app{
      "simconf: black-box confidence estimation for LLM generations by "
      "aggregating pairwise similarities among sampled outputs"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<simconf::cli::JsonConfig>());
  app.set_config("--config", "", "JSON config file mirroring the flags");

  // similarity ---------------------------------------------------------
  auto sim_opts = std::make_shared<SimilarityOpts>();
  CLI::App* sim = app.add_subcommand(
      "similarity", "Compute per-group pairwise similarity matrices");
  sim->add_option("--corpus", sim_opts->corpus, "Corpus JSONL")->required();
  sim->add_option("--metric", sim_opts->metric,
                  "jaccard | rouge1 | rougeL | sql-output-type")
      ->capture_default_str();
  sim->add_option("--out", sim_opts->out, "Matrices JSONL output")->required();
  sim->add_option("--jobs", sim_opts->jobs, "Worker threads")
      ->capture_default_str();
  sim->callback([sim_opts] { cmd_similarity(*sim_opts); });

  // reward --------------------------------------------------------------
  auto reward_opts = std::make_shared<RewardOpts>();
  CLI::App* reward = app.add_subcommand(
      "reward", "Label samples by thresholded Rouge-L against references");
  reward->add_option("--corpus", reward_opts->corpus, "Corpus JSONL")
      ->required();
  reward->add_option("--out", reward_opts->out, "Labeled corpus output")
      ->required();
  reward->add_option(
      "--reward-threshold", reward_opts->threshold,
      "Rouge-L threshold; defaults to 0.5 (qa) or 0.3 (summarization)");
  reward->add_flag("--overwrite", reward_opts->overwrite,
                   "Recompute rewards where references exist");
  reward->callback([reward_opts] { cmd_reward(*reward_opts); });

  // simulate -------------------------------------------------------------
  auto simulate_opts = std::make_shared<SimulateOpts>();
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic corpus with a known consistency "
                  "signal plus its similarity sidecar");
  simulate->add_option("--scenario", simulate_opts->scenario_file,
                       "Scenario config JSON (overrides the flags below)");
  simulate->add_option("--groups", simulate_opts->groups, "Group count")
      ->capture_default_str();
  simulate->add_option("--m", simulate_opts->m, "Samples per group")
      ->capture_default_str();
  simulate->add_option("--correct-rate", simulate_opts->correct_rate,
                       "P(sample is correct)")
      ->capture_default_str();
  simulate
      ->add_option("--sim-correct", simulate_opts->sim_correct,
                   "Beta a b for correct-sample similarities")
      ->expected(2);
  simulate
      ->add_option("--sim-incorrect", simulate_opts->sim_incorrect,
                   "Beta a b for incorrect-sample similarities")
      ->expected(2);
  simulate->add_option("--seed", simulate_opts->seed, "Scenario seed")
      ->capture_default_str();
  simulate->add_option("--out", simulate_opts->out, "Corpus JSONL output")
      ->required();
  simulate->add_option("--matrices-out", simulate_opts->matrices_out,
                       "Similarity sidecar output");
  simulate->callback([simulate_opts] { cmd_simulate(*simulate_opts); });

  // run -------------------------------------------------------------------
  auto run_opts = std::make_shared<RunOpts>();
  CLI::App* run = app.add_subcommand(
      "run", "Split, fit (supervised methods), score the test split, and "
             "evaluate");
  run->add_option("--corpus", run_opts->corpus, "Corpus JSONL with rewards")
      ->required();
  run->add_option("--matrices", run_opts->matrices,
                  "Precomputed similarity sidecar (else computed on the fly)");
  run->add_option("--method", run_opts->method,
                  "arith-agg | bayes-beta | avg-logprob | spec-ecc | clf-gen "
                  "| clf-pairs | clf-mean+gen | clf-pairs+gen")
      ->required();
  run->add_option("--metric", run_opts->metric,
                  "Similarity metric for methods that need one")
      ->capture_default_str();
  run->add_option("--fraction", run_opts->fraction, "Train fraction")
      ->capture_default_str();
  run->add_option("--seed", run_opts->seed, "Master seed")
      ->capture_default_str();
  run->add_option("--repeats", run_opts->repeats,
                  "Seeded split repetitions; reports mean with min/max")
      ->capture_default_str();
  run->add_option("--learner", run_opts->learner, "rf | logistic")
      ->capture_default_str();
  run->add_option("--trees", run_opts->trees, "Random forest size")
      ->capture_default_str();
  run->add_option("--max-depth", run_opts->max_depth, "Tree depth limit")
      ->capture_default_str();
  run->add_option("--min-leaf", run_opts->min_leaf, "Minimum leaf size")
      ->capture_default_str();
  run->add_option("--l2", run_opts->l2, "Logistic ridge strength")
      ->capture_default_str();
  run->add_option("--step", run_opts->step, "Logistic gradient step")
      ->capture_default_str();
  run->add_option("--max-iters", run_opts->max_iters,
                  "Logistic iteration cap")
      ->capture_default_str();
  run->add_flag("--sorted-features", run_opts->sorted_features,
                "Sort pairwise features descending (permutation-invariant)");
  run->add_option("--jobs", run_opts->jobs, "Worker threads")
      ->capture_default_str();
  run->add_option("--bins", run_opts->bins, "Calibration bin count")
      ->capture_default_str();
  run->add_option("--scores-out", run_opts->scores_out, "Scores JSONL output");
  run->add_option("--report-out", run_opts->report_out,
                  "Report JSON output (default: stdout)");
  run->add_option("--model-out", run_opts->model_out,
                  "Serialized fitted model (supervised methods)");
  run->add_option("--per-temperature", run_opts->per_temperature_out,
                  "Per-temperature metric breakdown JSON");
  run->add_flag("--table", run_opts->table, "Print aligned text tables");
  run->callback([run_opts] { cmd_run(*run_opts); });

  // report ---------------------------------------------------------------
  auto report_opts = std::make_shared<ReportOpts>();
  CLI::App* report = app.add_subcommand(
      "report", "Evaluate an external scores file against a rewarded corpus");
  report->add_option("--corpus", report_opts->corpus, "Corpus JSONL")
      ->required();
  report->add_option("--scores", report_opts->scores, "Scores JSONL")
      ->required();
  report->add_option("--method", report_opts->method, "Label for the report")
      ->capture_default_str();
  report->add_option("--bins", report_opts->bins, "Calibration bin count")
      ->capture_default_str();
  report->add_option("--out", report_opts->out,
                     "Report JSON output (default: stdout)");
  report->add_option("--csv", report_opts->csv, "Per-bin diagnostics CSV");
  report->add_option("--per-temperature", report_opts->per_temperature_out,
                     "Per-temperature metric breakdown JSON");
  report->add_flag("--table", report_opts->table, "Print aligned text table");
  report->callback([report_opts] { cmd_report(*report_opts); });

  // sample ------------------------------------------------------------------
  auto sample_opts = std::make_shared<SampleOpts>();
  CLI::App* sample = app.add_subcommand(
      "sample", "Sample generations from an OpenAI-compatible completions "
                "endpoint (or judge them with p(true))");
  sample->add_option("--queries", sample_opts->queries,
                     "Queries JSONL: {query_id, query, references?, context?}");
  sample->add_option("--out", sample_opts->out, "Output path")->required();
  sample->add_option("--corpus", sample_opts->corpus,
                     "Existing corpus to judge (p(true) mode)");
  sample->add_flag("--p-true", sample_opts->p_true,
                   "Score an existing corpus with the True/False judge");
  sample->add_option("--context", sample_opts->context,
                     "Extra context line for the p(true) prompt");
  sample->add_option("--task-label", sample_opts->task_label,
                     "task_label for the output corpus")
      ->capture_default_str();
  sample->add_option("--base-url", sample_opts->endpoint.base_url,
                     "Endpoint scheme://host[:port]")
      ->capture_default_str();
  sample->add_option("--model", sample_opts->endpoint.model_name,
                     "Model name sent with each request");
  sample->add_option("--api-key-env", sample_opts->api_key_env,
                     "Environment variable holding the API key");
  sample->add_option("--timeout", sample_opts->endpoint.timeout_seconds,
                     "Request timeout in seconds")
      ->capture_default_str();
  sample->add_option("--retries", sample_opts->endpoint.retries,
                     "Retries per request")
      ->capture_default_str();
  sample->add_option("--temperatures", sample_opts->plan.temperatures,
                     "Sampling temperatures (strictly increasing)");
  sample->add_option("--samples-per-temp",
                     sample_opts->plan.samples_per_temperature,
                     "Samples per temperature")
      ->capture_default_str();
  sample->add_option("--top-k", sample_opts->plan.top_k, "top-k")
      ->capture_default_str();
  sample->add_option("--top-p", sample_opts->plan.top_p, "top-p")
      ->capture_default_str();
  sample->add_option("--max-new-tokens", sample_opts->plan.max_new_tokens,
                     "Generation length cap")
      ->capture_default_str();
  sample->add_option("--eval-temps", sample_opts->plan.eval_temperature_count,
                     "How many of the lowest temperatures are evaluated")
      ->capture_default_str();
  sample->add_option("--prompt-template", sample_opts->prompt_template,
                     "Template with a {query} placeholder")
      ->capture_default_str();
  sample->add_option("--prompt-template-file",
                     sample_opts->prompt_template_file,
                     "Read the template from a file");
  sample->add_option("--record", sample_opts->record,
                     "Record request/response pairs to this fixture");
  sample->add_option("--replay", sample_opts->replay,
                     "Serve responses from a recorded fixture");
  sample->add_option("--jobs", sample_opts->jobs, "Concurrent queries")
      ->capture_default_str();
  sample->callback([sample_opts] { cmd_sample(*sample_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const simconf::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const simconf::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const simconf::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const simconf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
}
