#include "simconf/reward.hpp"

#include <algorithm>

#include "simconf/error.hpp"
#include "simconf/similarity.hpp"

namespace simconf {

double default_reward_threshold(const std::string& task_label) {
  if (task_label == "summarization") return 0.3;
  return 0.5;
}

int reward_rouge_threshold(const std::string& generation,
                           const std::vector<std::string>& references,
                           const RewardConfig& config) {
  if (references.empty())
    throw UsageError(
        "reward_rouge_threshold: references must be non-empty "
        "(precompute rewards in the corpus instead)");
  if (!(config.threshold > 0.0 && config.threshold < 1.0))
    throw UsageError("reward threshold must lie strictly in (0, 1)");

  const TokenSeq gen = tokenize(generation);
  double best = 0.0;
  for (const std::string& ref : references)
    best = std::max(best, rougeL(gen, tokenize(ref)));
  return best >= config.threshold ? 1 : 0;
}

AttachReport attach_rewards(const Corpus& corpus, const RewardConfig& config,
                            bool overwrite) {
  AttachReport report;
  report.corpus = corpus;
  for (QueryGroup& group : report.corpus.groups) {
    bool group_unlabeled = false;
    for (Sample& sample : group.samples) {
      if (!group.references.empty() && (overwrite || !sample.reward))
        sample.reward =
            reward_rouge_threshold(sample.text, group.references, config);
      if (sample.reward) {
        ++report.labeled;
      } else {
        ++report.unlabeled;
        group_unlabeled = true;
      }
    }
    if (group_unlabeled) report.unlabeled_group_ids.push_back(group.query_id);
  }
  return report;
}

}  // namespace simconf
