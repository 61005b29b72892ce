#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace simconf {

// One generation for a query.
struct Sample {
  std::string text;
  double temperature = 0.0;
  int sample_index = 0;
  std::optional<double> avg_logprob;  // mean token log-probability, <= 0
  std::optional<int> reward;          // binary correctness label
  bool eval_flag = true;              // confidence requested for this sample

  bool operator==(const Sample&) const = default;
};

// A query with its reference answers and sampled generations.
// Samples are kept in canonical order: ascending (temperature, sample_index).
// That order defines row/column indices of similarity matrices and the
// ordering of pairwise feature vectors.
struct QueryGroup {
  std::string query_id;
  std::string query;
  std::vector<std::string> references;
  std::vector<Sample> samples;

  bool operator==(const QueryGroup&) const = default;
};

struct Corpus {
  std::vector<QueryGroup> groups;
  std::string task_label = "other";  // qa | summarization | text-to-sql | other

  bool operator==(const Corpus&) const = default;
};

// Deterministic train/test partition of a corpus by query_id.
struct SplitAssignment {
  std::set<std::string> train_ids;
  std::set<std::string> test_ids;
  std::uint64_t seed = 0;
  double fraction = 0.5;
};

// One confidence score, keyed the way the scores file is keyed.
struct ScoreRecord {
  std::string query_id;
  int sample_index = 0;
  double temperature = 0.0;
  double confidence = 0.0;

  bool operator==(const ScoreRecord&) const = default;
};

// Sorts samples into canonical order. Throws DataError on duplicate
// (temperature, sample_index) pairs, which would make the order ambiguous.
void canonicalize_samples(QueryGroup& group);

// Validates a group against the corpus invariants (m >= 2, reward in {0,1},
// avg_logprob <= 0, at least one eval_flag). `where` prefixes error messages.
void validate_group(const QueryGroup& group, const std::string& where);

// Reads a JSONL corpus. Each line is one group object. Samples are re-sorted
// into canonical order; validation failures carry the 1-based line number.
Corpus load_corpus(const std::string& path);

// Writes a corpus as JSONL, one group per line, samples in canonical order.
void save_corpus(const Corpus& corpus, const std::string& path);

// Seeded partition: query_ids are sorted lexicographically, shuffled with a
// deterministic Fisher-Yates, and the first floor(fraction * n) go to train.
SplitAssignment split_train_test(const Corpus& corpus, double fraction,
                                 std::uint64_t seed);

// Writes scores as JSONL ordered by (query_id, temperature, sample_index).
// Confidences must lie in [0, 1].
void write_scores(const std::string& path, std::vector<ScoreRecord> scored);

// Reads a scores file written by write_scores.
std::vector<ScoreRecord> load_scores(const std::string& path);

}  // namespace simconf
