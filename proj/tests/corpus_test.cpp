#include "simconf/corpus.hpp"

#include <doctest.h>

#include <algorithm>
#include <tuple>

#include "simconf/error.hpp"
#include "simconf/rng.hpp"
#include "test_util.hpp"

using namespace simconf;
using testutil::TempDir;
using testutil::write_text;

namespace {

const char* kTwoGroups = R"({"query_id": "q1", "query": "capital of France?", "references": ["Paris"], "task_label": "qa", "samples": [{"text": "Paris", "temperature": 0.25, "sample_index": 0, "avg_logprob": -0.1, "reward": 1, "eval_flag": true}, {"text": "Lyon", "temperature": 0.5, "sample_index": 0, "eval_flag": true}]}
{"query_id": "q2", "query": "2+2?", "references": ["4"], "samples": [{"text": "4", "temperature": 0.25, "sample_index": 0, "eval_flag": true}, {"text": "5", "temperature": 0.25, "sample_index": 1, "eval_flag": false}]}
)";

}  // namespace

TEST_CASE("load_corpus reads well-formed groups") {
  TempDir dir;
  write_text(dir.file("c.jsonl"), kTwoGroups);
  const Corpus corpus = load_corpus(dir.file("c.jsonl"));
  REQUIRE(corpus.groups.size() == 2);
  CHECK(corpus.task_label == "qa");
  CHECK(corpus.groups[0].query_id == "q1");
  CHECK(corpus.groups[0].samples[0].avg_logprob == -0.1);
  CHECK(corpus.groups[0].samples[0].reward == 1);
  CHECK_FALSE(corpus.groups[1].samples[1].eval_flag);
}

TEST_CASE("load_corpus rejects duplicate query_id, naming it") {
  TempDir dir;
  const std::string line =
      R"({"query_id": "q1", "query": "x", "references": [], "samples": [{"text": "a", "temperature": 0, "sample_index": 0}, {"text": "b", "temperature": 0, "sample_index": 1}]})";
  write_text(dir.file("c.jsonl"), line + "\n" + line + "\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir.file("c.jsonl")),
                       doctest::Contains("q1"), DataError);
}

TEST_CASE("load_corpus attaches line numbers to parse errors") {
  TempDir dir;
  const std::string good =
      R"({"query_id": "q1", "query": "x", "references": [], "samples": [{"text": "a", "temperature": 0, "sample_index": 0}, {"text": "b", "temperature": 0, "sample_index": 1}]})";
  write_text(dir.file("c.jsonl"), good + "\n{not json\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir.file("c.jsonl")),
                       doctest::Contains(":2"), DataError);
}

TEST_CASE("load_corpus enforces group and sample invariants") {
  TempDir dir;
  SUBCASE("fewer than 2 samples") {
    write_text(dir.file("c.jsonl"),
               R"({"query_id": "q", "query": "x", "references": [], "samples": [{"text": "a", "temperature": 0, "sample_index": 0}]})"
               "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("c.jsonl")), DataError);
  }
  SUBCASE("reward outside {0,1}") {
    write_text(dir.file("c.jsonl"),
               R"({"query_id": "q", "query": "x", "references": [], "samples": [{"text": "a", "temperature": 0, "sample_index": 0, "reward": 2}, {"text": "b", "temperature": 0, "sample_index": 1}]})"
               "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("c.jsonl")), DataError);
  }
  SUBCASE("positive avg_logprob") {
    write_text(dir.file("c.jsonl"),
               R"({"query_id": "q", "query": "x", "references": [], "samples": [{"text": "a", "temperature": 0, "sample_index": 0, "avg_logprob": 0.2}, {"text": "b", "temperature": 0, "sample_index": 1}]})"
               "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("c.jsonl")), DataError);
  }
  SUBCASE("no evaluated sample") {
    write_text(dir.file("c.jsonl"),
               R"({"query_id": "q", "query": "x", "references": [], "samples": [{"text": "a", "temperature": 0, "sample_index": 0, "eval_flag": false}, {"text": "b", "temperature": 0, "sample_index": 1, "eval_flag": false}]})"
               "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("c.jsonl")), DataError);
  }
  SUBCASE("duplicate (temperature, sample_index)") {
    write_text(dir.file("c.jsonl"),
               R"({"query_id": "q", "query": "x", "references": [], "samples": [{"text": "a", "temperature": 0, "sample_index": 0}, {"text": "b", "temperature": 0, "sample_index": 0}]})"
               "\n");
    CHECK_THROWS_AS(load_corpus(dir.file("c.jsonl")), DataError);
  }
}

TEST_CASE("samples are re-sorted into canonical (temperature, index) order") {
  TempDir dir;
  // Arrives ordered by sample_index first.
  write_text(dir.file("c.jsonl"),
             R"({"query_id": "q", "query": "x", "references": [], "samples": [)"
             R"({"text": "a", "temperature": 0.5, "sample_index": 0},)"
             R"({"text": "b", "temperature": 0.25, "sample_index": 1},)"
             R"({"text": "c", "temperature": 0.25, "sample_index": 0},)"
             R"({"text": "d", "temperature": 0.5, "sample_index": 1}]})"
             "\n");
  const Corpus corpus = load_corpus(dir.file("c.jsonl"));

  // Oracle: sort the (temperature, index) pairs directly.
  std::vector<std::pair<double, int>> expected = {
      {0.5, 0}, {0.25, 1}, {0.25, 0}, {0.5, 1}};
  std::sort(expected.begin(), expected.end());
  const auto& samples = corpus.groups[0].samples;
  REQUIRE(samples.size() == expected.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].temperature == expected[i].first);
    CHECK(samples[i].sample_index == expected[i].second);
  }
  CHECK(samples[0].text == "c");
}

TEST_CASE("save/load round-trips random corpora") {
  TempDir dir;
  Rng rng(42);
  for (int round = 0; round < 20; ++round) {
    Corpus corpus;
    corpus.task_label = round % 2 == 0 ? "qa" : "summarization";
    const std::size_t n_groups = 1 + rng.below(5);
    for (std::size_t g = 0; g < n_groups; ++g) {
      QueryGroup group;
      group.query_id = "g" + std::to_string(g);
      group.query = testutil::random_text(rng);
      if (rng.bernoulli(0.5)) group.references.push_back(testutil::random_text(rng));
      const std::size_t m = 2 + rng.below(4);
      for (std::size_t i = 0; i < m; ++i) {
        Sample s;
        s.text = testutil::random_text(rng, 0, 6);
        s.temperature = 0.25 * static_cast<double>(1 + rng.below(4));
        s.sample_index = static_cast<int>(i);
        if (rng.bernoulli(0.5)) s.avg_logprob = -rng.uniform();
        if (rng.bernoulli(0.5)) s.reward = rng.bernoulli(0.5) ? 1 : 0;
        s.eval_flag = true;
        group.samples.push_back(std::move(s));
      }
      canonicalize_samples(group);
      corpus.groups.push_back(std::move(group));
    }
    save_corpus(corpus, dir.file("rt.jsonl"));
    const Corpus loaded = load_corpus(dir.file("rt.jsonl"));
    CHECK(loaded == corpus);
  }
}

TEST_CASE("split_train_test boundaries and arithmetic") {
  Corpus corpus;
  for (int g = 0; g < 10; ++g)
    corpus.groups.push_back(
        testutil::make_group("g" + std::to_string(g), {"a", "b"}));

  SUBCASE("fraction 1.0 puts everything in train") {
    const SplitAssignment split = split_train_test(corpus, 1.0, 9);
    CHECK(split.train_ids.size() == 10);
    CHECK(split.test_ids.empty());
  }
  SUBCASE("fraction 0.5 on 10 groups gives 5/5") {
    const SplitAssignment split = split_train_test(corpus, 0.5, 9);
    CHECK(split.train_ids.size() == 5);
    CHECK(split.test_ids.size() == 5);
  }
  SUBCASE("same seed reproduces the same assignment") {
    const SplitAssignment a = split_train_test(corpus, 0.5, 7);
    const SplitAssignment b = split_train_test(corpus, 0.5, 7);
    CHECK(a.train_ids == b.train_ids);
    CHECK(a.test_ids == b.test_ids);
  }
  SUBCASE("fraction out of range") {
    CHECK_THROWS_AS(split_train_test(corpus, 0.0, 1), UsageError);
    CHECK_THROWS_AS(split_train_test(corpus, 1.5, 1), UsageError);
  }
}

TEST_CASE("split_train_test is a partition for any fraction and seed") {
  Rng rng(5);
  for (int round = 0; round < 30; ++round) {
    Corpus corpus;
    const std::size_t n = 1 + rng.below(20);
    for (std::size_t g = 0; g < n; ++g)
      corpus.groups.push_back(
          testutil::make_group("id" + std::to_string(g), {"a", "b"}));
    const double fraction = 0.05 + 0.95 * rng.uniform();
    const std::uint64_t seed = rng.next_u64();
    const SplitAssignment split = split_train_test(corpus, fraction, seed);

    CHECK(split.train_ids.size() ==
          static_cast<std::size_t>(fraction * static_cast<double>(n)));
    CHECK(split.train_ids.size() + split.test_ids.size() == n);
    for (const std::string& id : split.train_ids)
      CHECK(split.test_ids.count(id) == 0);
  }
}

TEST_CASE("write_scores formats and orders records") {
  TempDir dir;
  SUBCASE("empty list writes an empty file") {
    write_scores(dir.file("s.jsonl"), {});
    CHECK(testutil::read_text(dir.file("s.jsonl")).empty());
  }
  SUBCASE("single record round-trips") {
    write_scores(dir.file("s.jsonl"), {{"q1", 2, 0.5, 0.75}});
    const auto back = load_scores(dir.file("s.jsonl"));
    REQUIRE(back.size() == 1);
    CHECK(back[0] == ScoreRecord{"q1", 2, 0.5, 0.75});
  }
  SUBCASE("records are ordered by (query_id, temperature, sample_index)") {
    std::vector<ScoreRecord> records = {
        {"q2", 0, 0.25, 0.1}, {"q1", 1, 0.5, 0.2}, {"q1", 0, 0.25, 0.3},
        {"q1", 0, 0.5, 0.4}};
    write_scores(dir.file("s.jsonl"), records);
    const auto back = load_scores(dir.file("s.jsonl"));

    auto expected = records;
    std::sort(expected.begin(), expected.end(),
              [](const ScoreRecord& a, const ScoreRecord& b) {
                return std::tie(a.query_id, a.temperature, a.sample_index) <
                       std::tie(b.query_id, b.temperature, b.sample_index);
              });
    CHECK(back == expected);
  }
  SUBCASE("confidence outside [0,1] is rejected") {
    CHECK_THROWS_AS(write_scores(dir.file("s.jsonl"), {{"q", 0, 0.0, 1.5}}),
                    UsageError);
  }
}
