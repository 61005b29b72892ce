#pragma once

#include <string>
#include <vector>

#include "simconf/corpus.hpp"

namespace simconf {

// Correctness labeling by thresholded Rouge-L against the references.
struct RewardConfig {
  double threshold = 0.5;  // strictly inside (0, 1)
};

// Per-task default thresholds: 0.5 for qa, 0.3 for summarization, 0.5
// otherwise.
double default_reward_threshold(const std::string& task_label);

// 1 iff max over references of rougeL(generation, ref) >= threshold.
// The comparison is inclusive so exact matches pass at threshold 1.0.
// Throws UsageError when references is empty.
int reward_rouge_threshold(const std::string& generation,
                           const std::vector<std::string>& references,
                           const RewardConfig& config);

struct AttachReport {
  Corpus corpus;
  std::size_t labeled = 0;    // samples carrying a reward afterwards
  std::size_t unlabeled = 0;  // samples with neither references nor reward
  std::vector<std::string> unlabeled_group_ids;
};

// Labels every sample in groups that have references. Existing rewards are
// kept unless `overwrite`; overwrite only applies where references exist.
// Samples with neither references nor a precomputed reward are reported,
// not fatal.
AttachReport attach_rewards(const Corpus& corpus, const RewardConfig& config,
                            bool overwrite);

}  // namespace simconf
