#include "simconf/similarity.hpp"

#include <doctest.h>

#include <cmath>

#include "simconf/error.hpp"
#include "simconf/rng.hpp"
#include "test_util.hpp"

using namespace simconf;
using testutil::TempDir;

TEST_CASE("tokenize applies the documented rules") {
  CHECK(tokenize("") == TokenSeq{});
  CHECK(tokenize("The cat, the CAT.") == TokenSeq{"the", "cat", "the", "cat"});
  // Generic, not SQL-aware: only the trailing ')' is edge punctuation.
  CHECK(tokenize("SELECT count(*)") == TokenSeq{"select", "count(*"});
  CHECK(tokenize("  spaced\tout\nwords ") == TokenSeq{"spaced", "out", "words"});
  CHECK(tokenize("a\xC2\xA0z") == TokenSeq{"a", "z"});  // U+00A0 splits
  CHECK(tokenize("... ,,, !!") == TokenSeq{});           // punctuation-only
  CHECK(tokenize("((nested))") == TokenSeq{"nested"});
  CHECK(tokenize("don't") == TokenSeq{"don't"});  // inner quote survives
}

TEST_CASE("jaccard") {
  const TokenSeq abc = {"a", "b", "c"};
  CHECK(jaccard(abc, abc) == 1.0);
  CHECK(jaccard({"a"}, {"b"}) == 0.0);
  CHECK(jaccard(abc, {"b", "c", "d"}) == 0.5);
  CHECK(jaccard({}, {}) == 1.0);
  CHECK(jaccard({}, abc) == 0.0);
  CHECK(jaccard({"a", "a", "b"}, {"a", "b"}) == 1.0);  // set semantics
}

TEST_CASE("lcs_length") {
  CHECK(lcs_length({"a", "b"}, {}) == 0);
  const TokenSeq seq = {"x", "y", "z"};
  CHECK(lcs_length(seq, seq) == 3);
  // Textbook DP example.
  CHECK(lcs_length({"A", "B", "C", "B", "D", "A", "B"},
                   {"B", "D", "C", "A", "B", "A"}) == 4);
}

TEST_CASE("rouge1 clipped-count F1") {
  CHECK(rouge1({"a", "b"}, {"a", "b"}) == 1.0);
  CHECK(rouge1({"a", "b", "c"}, {"b", "c", "d"}) == doctest::Approx(2.0 / 3.0));
  // Clipping: overlap of [a,a] vs [a] is 1, so P=1/2, R=1, F1=2/3.
  CHECK(rouge1({"a", "a"}, {"a"}) == doctest::Approx(2.0 / 3.0));
  CHECK(rouge1({}, {}) == 1.0);
  CHECK(rouge1({}, {"a"}) == 0.0);
}

TEST_CASE("rougeL LCS F1") {
  CHECK(rougeL({"a", "b", "c"}, {"a", "b", "c"}) == 1.0);
  CHECK(rougeL({"a", "b", "c", "d"}, {"a", "c", "d"}) ==
        doctest::Approx(6.0 / 7.0).epsilon(1e-12));
  CHECK(rougeL({"a", "b"}, {"c", "d"}) == 0.0);
  CHECK(rougeL({}, {}) == 1.0);
}

TEST_CASE("metric axioms on random strings, and rougeL <= rouge1") {
  Rng rng(123);
  for (int round = 0; round < 200; ++round) {
    const std::string sa = testutil::random_text(rng);
    const std::string sb = testutil::random_text(rng);
    const TokenSeq a = tokenize(sa);
    const TokenSeq b = tokenize(sb);

    CHECK(jaccard(a, b) == jaccard(b, a));
    CHECK(rouge1(a, b) == rouge1(b, a));
    CHECK(rougeL(a, b) == rougeL(b, a));
    CHECK(jaccard(a, a) == 1.0);
    CHECK(rouge1(a, a) == 1.0);
    CHECK(rougeL(a, a) == 1.0);
    for (const double v : {jaccard(a, b), rouge1(a, b), rougeL(a, b)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(rougeL(a, b) <= rouge1(a, b) + 1e-15);
    CHECK(output_type_similarity(sa, sb) == output_type_similarity(sb, sa));
    CHECK(output_type_similarity(sa, sa) == 1.0);
  }
}

TEST_CASE("sql_output_type keyword scan") {
  CHECK(sql_output_type("SELECT count(*) FROM Documents") == SqlShape::kSimple);
  CHECK(sql_output_type("SELECT a FROM t1 JOIN t2 ON t1.x=t2.x") ==
        SqlShape::kJoin);
  CHECK(sql_output_type("SELECT a FROM t WHERE b IN (SELECT b FROM u)") ==
        SqlShape::kNested);
  CHECK_THROWS_AS(sql_output_type(""), DataError);
  CHECK_THROWS_AS(sql_output_type("   "), DataError);

  SUBCASE("comma-separated FROM counts as join") {
    CHECK(sql_output_type("SELECT a, b FROM t1, t2 WHERE t1.x = t2.x") ==
          SqlShape::kJoin);
    // Commas in the select list or inside parens do not.
    CHECK(sql_output_type("SELECT a, b FROM t WHERE x IN (1, 2)") ==
          SqlShape::kSimple);
  }
  SUBCASE("nested wins over join") {
    CHECK(sql_output_type(
              "SELECT a FROM t1 JOIN t2 ON t1.x = t2.x "
              "WHERE b IN (SELECT b FROM u)") == SqlShape::kNested);
  }
  SUBCASE("keywords are case-insensitive and word-bounded") {
    CHECK(sql_output_type("select a from joined_table") == SqlShape::kSimple);
    CHECK(sql_output_type("select a from t join u on t.x=u.x") ==
          SqlShape::kJoin);
  }
  SUBCASE("string literals are opaque") {
    CHECK(sql_output_type("SELECT a FROM t WHERE x = '(SELECT 1)'") ==
          SqlShape::kSimple);
  }
}

TEST_CASE("output_type_similarity") {
  const std::string simple = "SELECT count(*) FROM Documents";
  const std::string join_a = "SELECT a FROM t1 JOIN t2 ON t1.x=t2.x";
  const std::string join_b = "SELECT z FROM u1 JOIN u2 ON u1.k=u2.k";
  CHECK(output_type_similarity(simple, simple) == 1.0);
  CHECK(output_type_similarity(simple, join_a) == 0.0);
  CHECK(output_type_similarity(join_a, join_b) == 1.0);
  CHECK_THROWS_AS(output_type_similarity(simple, ""), DataError);
}

TEST_CASE("similarity_matrix") {
  SUBCASE("identical samples give the all-ones matrix") {
    const QueryGroup group =
        testutil::make_group("g", {"same text", "same text", "same text"});
    const SimilarityMatrix m = similarity_matrix(group, "jaccard");
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(m.at(i, j) == 1.0);
  }
  SUBCASE("off-diagonal from the jaccard example") {
    const QueryGroup group = testutil::make_group("g", {"a b c", "b c d"});
    const SimilarityMatrix m = similarity_matrix(group, "jaccard");
    CHECK(m.at(0, 1) == 0.5);
    CHECK(m.at(1, 0) == 0.5);
    CHECK(m.at(0, 0) == 1.0);
  }
  SUBCASE("unknown metric") {
    const QueryGroup group = testutil::make_group("g", {"a", "b"});
    CHECK_THROWS_AS(similarity_matrix(group, "cosine"), UsageError);
  }
  SUBCASE("entries equal direct pairwise metric calls") {
    Rng rng(9);
    for (int round = 0; round < 20; ++round) {
      std::vector<std::string> texts;
      const std::size_t m = 2 + rng.below(4);
      for (std::size_t i = 0; i < m; ++i)
        texts.push_back(testutil::random_text(rng));
      const QueryGroup group = testutil::make_group("g", texts);
      for (const std::string metric : {"jaccard", "rouge1", "rougeL"}) {
        const SimilarityMatrix matrix = similarity_matrix(group, metric);
        matrix.validate("test");
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            CHECK(matrix.at(i, j) ==
                  pairwise_similarity(metric, texts[i], texts[j]));
          }
      }
    }
  }
}

TEST_CASE("matrices sidecar round-trips exactly") {
  TempDir dir;
  Rng rng(17);
  std::map<std::string, SimilarityMatrix> matrices;
  for (int g = 0; g < 5; ++g) {
    std::vector<std::string> texts;
    for (int i = 0; i < 4; ++i) texts.push_back(testutil::random_text(rng));
    matrices.emplace("g" + std::to_string(g),
                     similarity_matrix(testutil::make_group("x", texts),
                                       "rougeL"));
  }
  save_matrices(matrices, dir.file("m.jsonl"));
  const auto loaded = load_matrices(dir.file("m.jsonl"));
  REQUIRE(loaded.size() == matrices.size());
  for (const auto& [id, matrix] : matrices) {
    const auto it = loaded.find(id);
    REQUIRE(it != loaded.end());
    CHECK(it->second.values == matrix.values);  // bit-exact round-trip
    CHECK(it->second.metric == matrix.metric);
  }
}
