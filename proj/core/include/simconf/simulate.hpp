#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "simconf/corpus.hpp"
#include "simconf/similarity.hpp"

namespace simconf {

// Synthetic scenario with a controllable consistency signal: pairwise
// similarities of correct and incorrect samples come from two different
// Beta distributions.
struct ScenarioConfig {
  std::size_t group_count = 100;
  std::size_t m = 10;         // samples per group, >= 2
  double correct_rate = 0.5;  // strictly inside (0,1)
  double sim_correct_a = 8.0;
  double sim_correct_b = 2.0;
  double sim_incorrect_a = 2.0;
  double sim_incorrect_b = 8.0;
  std::uint64_t seed = 0;
};

std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& text);

struct Scenario {
  Corpus corpus;
  std::map<std::string, SimilarityMatrix> matrices;
};

// Per group: each sample is correct with probability correct_rate; the
// similarity for pair (i, j), i < j, is drawn from the Beta of sample i's
// class; the matrix is symmetrized with unit diagonal and rewards are set
// from the labels. Fully deterministic under config.seed (group g uses the
// derived stream g regardless of scheduling).
Scenario generate_scenario(const ScenarioConfig& config);

}  // namespace simconf
