#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "simconf/corpus.hpp"

namespace simconf {

using TokenSeq = std::vector<std::string>;

// Deterministic tokenizer shared by all token metrics:
//   - ASCII letters lowercased
//   - split on Unicode whitespace (UTF-8 decoded)
//   - punctuation .,;:!?"'`()[]{} stripped repeatedly from token edges
//   - empty tokens dropped
// Documented exactly so scores are bit-reproducible across implementations.
TokenSeq tokenize(const std::string& text);

// |set(a) & set(b)| / |set(a) | set(b)|; 1.0 when both are empty.
double jaccard(const TokenSeq& a, const TokenSeq& b);

// Longest common subsequence length (dynamic programming).
std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

// Unigram-overlap F1 with clipped counts; 1.0 when both empty, 0.0 when
// exactly one side is empty.
double rouge1(const TokenSeq& a, const TokenSeq& b);

// LCS-based F1; same empty-input conventions as rouge1.
double rougeL(const TokenSeq& a, const TokenSeq& b);

enum class SqlShape { kSimple, kJoin, kNested };

// Keyword-scan classification of a SQL string into simple/join/nested.
// nested: a SELECT inside parentheses after the outer SELECT; join: a JOIN
// keyword or a comma-separated FROM list; otherwise simple. Precedence
// nested > join > simple. Throws DataError on an empty string.
SqlShape sql_output_type(const std::string& sql);

const char* sql_shape_name(SqlShape shape);

// 1.0 iff both queries classify into the same shape.
double output_type_similarity(const std::string& a, const std::string& b);

// Registered metric names: jaccard | rouge1 | rougeL | sql-output-type.
bool is_known_metric(const std::string& metric);
std::vector<std::string> known_metrics();

// Pairwise similarity on raw strings using a registered metric.
double pairwise_similarity(const std::string& metric, const std::string& a,
                           const std::string& b);

// Symmetric m x m matrix of pairwise sample similarities, diagonal 1.
struct SimilarityMatrix {
  std::string metric;
  std::size_t m = 0;
  std::vector<double> values;  // row-major, m*m

  double at(std::size_t i, std::size_t j) const { return values[i * m + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * m + j]; }

  // Row i without the diagonal entry, in canonical sample order.
  std::vector<double> row_without_diagonal(std::size_t i) const;

  // Checks symmetry, unit diagonal, and [0,1] range; throws DataError.
  void validate(const std::string& where) const;
};

// Builds the matrix over the group's canonical sample order. Each unordered
// pair is computed once; the diagonal is forced to 1. Unknown metric names
// raise UsageError.
SimilarityMatrix similarity_matrix(const QueryGroup& group,
                                   const std::string& metric);

// Sidecar matrices file: JSONL of {query_id, metric, m, values} with values
// as nested row arrays. Matrices are validated on load.
void save_matrices(const std::map<std::string, SimilarityMatrix>& matrices,
                   const std::string& path);
std::map<std::string, SimilarityMatrix> load_matrices(const std::string& path);

}  // namespace simconf
