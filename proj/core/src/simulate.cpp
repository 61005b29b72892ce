#include "simconf/simulate.hpp"

#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simconf/error.hpp"
#include "simconf/rng.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

namespace {

void validate_config(const ScenarioConfig& config) {
  if (config.group_count == 0)
    throw UsageError("scenario: group_count must be positive");
  if (config.m < 2) throw UsageError("scenario: m must be at least 2");
  if (!(config.correct_rate > 0.0 && config.correct_rate < 1.0))
    throw UsageError("scenario: correct_rate must lie strictly in (0,1)");
  if (config.sim_correct_a <= 0.0 || config.sim_correct_b <= 0.0 ||
      config.sim_incorrect_a <= 0.0 || config.sim_incorrect_b <= 0.0)
    throw UsageError("scenario: Beta parameters must be positive");
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& config) {
  Json j;
  j["group_count"] = config.group_count;
  j["m"] = config.m;
  j["correct_rate"] = config.correct_rate;
  j["sim_correct"] = Json::array({config.sim_correct_a, config.sim_correct_b});
  j["sim_incorrect"] =
      Json::array({config.sim_incorrect_a, config.sim_incorrect_b});
  j["seed"] = config.seed;
  return j.dump(2);
}

ScenarioConfig scenario_from_json(const std::string& text) {
  ScenarioConfig config;
  try {
    const Json j = Json::parse(text);
    config.group_count = j.at("group_count").get<std::size_t>();
    config.m = j.at("m").get<std::size_t>();
    config.correct_rate = j.at("correct_rate").get<double>();
    config.sim_correct_a = j.at("sim_correct").at(0).get<double>();
    config.sim_correct_b = j.at("sim_correct").at(1).get<double>();
    config.sim_incorrect_a = j.at("sim_incorrect").at(0).get<double>();
    config.sim_incorrect_b = j.at("sim_incorrect").at(1).get<double>();
    config.seed = j.value("seed", std::uint64_t{0});
  } catch (const Json::exception& e) {
    throw DataError(std::string("scenario_from_json: ") + e.what());
  }
  validate_config(config);
  return config;
}

Scenario generate_scenario(const ScenarioConfig& config) {
  validate_config(config);
  const Rng master(config.seed);

  Scenario scenario;
  scenario.corpus.task_label = "other";
  scenario.corpus.groups.reserve(config.group_count);

  const int id_width =
      static_cast<int>(std::to_string(config.group_count - 1).size());

  for (std::size_t g = 0; g < config.group_count; ++g) {
    Rng rng = master.derive(g);
    const std::size_t m = config.m;

    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i)
      labels[i] = rng.bernoulli(config.correct_rate) ? 1 : 0;

    SimilarityMatrix matrix;
    matrix.metric = "synthetic";
    matrix.m = m;
    matrix.values.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) matrix.at(i, i) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        // Pair similarity follows the lower-indexed sample's class.
        const double s =
            labels[i] == 1
                ? rng.beta(config.sim_correct_a, config.sim_correct_b)
                : rng.beta(config.sim_incorrect_a, config.sim_incorrect_b);
        matrix.at(i, j) = s;
        matrix.at(j, i) = s;
      }
    }

    std::ostringstream id;
    id << "sim-" << std::setfill('0') << std::setw(id_width) << g;

    QueryGroup group;
    group.query_id = id.str();
    group.query = "synthetic query " + std::to_string(g);
    for (std::size_t i = 0; i < m; ++i) {
      Sample sample;
      sample.text = group.query_id + "/s" + std::to_string(i);
      sample.temperature = 1.0;
      sample.sample_index = static_cast<int>(i);
      sample.reward = labels[i];
      sample.eval_flag = true;
      group.samples.push_back(std::move(sample));
    }

    scenario.matrices.emplace(group.query_id, std::move(matrix));
    scenario.corpus.groups.push_back(std::move(group));
  }
  return scenario;
}

}  // namespace simconf
