#include "simconf/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "simconf/error.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

namespace {

bool is_unicode_space(std::uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes one UTF-8 codepoint at `i`, advancing `i`. Invalid bytes are
// consumed one at a time and returned verbatim (never whitespace).
std::uint32_t next_codepoint(const std::string& s, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(s[k]));
  };
  const std::uint32_t b0 = byte(i);
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if (b0 < 0x80) {
    ++i;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0x10000 + b0;  // invalid lead byte, opaque non-space value
  }
  if (i + len > s.size()) {
    ++i;
    return 0x10000 + b0;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const std::uint32_t bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return 0x10000 + b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  return cp;
}

bool is_edge_punct(char c) {
  static const std::string kPunct = ".,;:!?\"'`()[]{}";
  return kPunct.find(c) != std::string::npos;
}

void push_token(TokenSeq& out, std::string& raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_edge_punct(raw[begin])) ++begin;
  while (end > begin && is_edge_punct(raw[end - 1])) --end;
  if (end > begin) out.push_back(raw.substr(begin, end - begin));
  raw.clear();
}

// Token counts with interned ids, reused by rouge1 and jaccard.
std::unordered_map<std::string, std::size_t> count_tokens(const TokenSeq& t) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const std::string& tok : t) ++counts[tok];
  return counts;
}

double f1(double overlap, double len_a, double len_b) {
  const double p = overlap / len_a;
  const double r = overlap / len_b;
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

// --- SQL shape scanner -----------------------------------------------------

struct SqlToken {
  enum Kind { kWord, kPunct } kind;
  std::string text;  // uppercased for words
};

std::vector<SqlToken> scan_sql(const std::string& sql) {
  std::vector<SqlToken> tokens;
  std::size_t i = 0;
  const std::size_t n = sql.size();
  while (i < n) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '\'' || c == '"') {
      // Skip quoted literal/identifier; doubled quotes escape.
      const char q = c;
      ++i;
      while (i < n) {
        if (sql[i] == q) {
          if (i + 1 < n && sql[i + 1] == q) {
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        ++i;
      }
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (i < n && (std::isalnum(static_cast<unsigned char>(sql[i])) ||
                       sql[i] == '_')) {
        word.push_back(static_cast<char>(
            std::toupper(static_cast<unsigned char>(sql[i]))));
        ++i;
      }
      tokens.push_back({SqlToken::kWord, std::move(word)});
    } else {
      tokens.push_back({SqlToken::kPunct, std::string(1, c)});
      ++i;
    }
  }
  return tokens;
}

bool ends_from_clause(const std::string& word) {
  return word == "WHERE" || word == "GROUP" || word == "ORDER" ||
         word == "HAVING" || word == "LIMIT" || word == "UNION" ||
         word == "INTERSECT" || word == "EXCEPT";
}

}  // namespace

TokenSeq tokenize(const std::string& text) {
  TokenSeq out;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = next_codepoint(text, i);
    if (is_unicode_space(cp)) {
      push_token(out, current);
      continue;
    }
    for (std::size_t k = start; k < i; ++k) {
      char c = text[k];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      current.push_back(c);
    }
  }
  push_token(out, current);
  return out;
}

double jaccard(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() && b.empty()) return 1.0;
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  std::size_t intersection = 0;
  for (const std::string& t : sa) intersection += sb.count(t);
  const std::size_t unions = sa.size() + sb.size() - intersection;
  if (unions == 0) return 1.0;
  return static_cast<double>(intersection) / static_cast<double>(unions);
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() || b.empty()) return 0;
  // Intern tokens so the DP compares ints.
  std::unordered_map<std::string, int> ids;
  auto intern = [&](const std::string& t) {
    return ids.emplace(t, static_cast<int>(ids.size())).first->second;
  };
  std::vector<int> ia(a.size()), ib(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ia[i] = intern(a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) ib[j] = intern(b[j]);

  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (ia[i - 1] == ib[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge1(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const auto ca = count_tokens(a);
  const auto cb = count_tokens(b);
  std::size_t overlap = 0;
  for (const auto& [tok, na] : ca) {
    const auto it = cb.find(tok);
    if (it != cb.end()) overlap += std::min(na, it->second);
  }
  return f1(static_cast<double>(overlap), static_cast<double>(a.size()),
            static_cast<double>(b.size()));
}

double rougeL(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(a, b));
  return f1(lcs, static_cast<double>(a.size()), static_cast<double>(b.size()));
}

SqlShape sql_output_type(const std::string& sql) {
  const std::vector<SqlToken> tokens = scan_sql(sql);
  if (tokens.empty())
    throw DataError("sql_output_type: cannot classify empty SQL string");

  bool seen_select = false;
  bool has_join = false;
  bool from_comma = false;
  int depth = 0;
  int from_depth = -1;  // paren depth of an open FROM clause, -1 when closed

  for (const SqlToken& tok : tokens) {
    if (tok.kind == SqlToken::kPunct) {
      if (tok.text == "(") {
        ++depth;
      } else if (tok.text == ")") {
        if (from_depth >= 0 && depth <= from_depth) from_depth = -1;
        depth = std::max(0, depth - 1);
      } else if (tok.text == ",") {
        if (depth == from_depth) from_comma = true;
      } else if (tok.text == ";") {
        from_depth = -1;
      }
      continue;
    }
    if (tok.text == "SELECT") {
      if (seen_select && depth > 0) return SqlShape::kNested;
      seen_select = true;
    } else if (tok.text == "JOIN") {
      has_join = true;
    } else if (tok.text == "FROM") {
      from_depth = depth;
    } else if (from_depth >= 0 && depth == from_depth &&
               ends_from_clause(tok.text)) {
      from_depth = -1;
    }
  }
  return (has_join || from_comma) ? SqlShape::kJoin : SqlShape::kSimple;
}

const char* sql_shape_name(SqlShape shape) {
  switch (shape) {
    case SqlShape::kSimple: return "simple";
    case SqlShape::kJoin: return "join";
    case SqlShape::kNested: return "nested";
  }
  return "simple";
}

double output_type_similarity(const std::string& a, const std::string& b) {
  return sql_output_type(a) == sql_output_type(b) ? 1.0 : 0.0;
}

bool is_known_metric(const std::string& metric) {
  return metric == "jaccard" || metric == "rouge1" || metric == "rougeL" ||
         metric == "sql-output-type";
}

std::vector<std::string> known_metrics() {
  return {"jaccard", "rouge1", "rougeL", "sql-output-type"};
}

double pairwise_similarity(const std::string& metric, const std::string& a,
                           const std::string& b) {
  if (metric == "jaccard") return jaccard(tokenize(a), tokenize(b));
  if (metric == "rouge1") return rouge1(tokenize(a), tokenize(b));
  if (metric == "rougeL") return rougeL(tokenize(a), tokenize(b));
  if (metric == "sql-output-type") return output_type_similarity(a, b);
  throw UsageError("unknown similarity metric '" + metric + "'");
}

std::vector<double> SimilarityMatrix::row_without_diagonal(
    std::size_t i) const {
  std::vector<double> row;
  row.reserve(m > 0 ? m - 1 : 0);
  for (std::size_t j = 0; j < m; ++j)
    if (j != i) row.push_back(at(i, j));
  return row;
}

void SimilarityMatrix::validate(const std::string& where) const {
  if (m < 2) throw DataError(where + ": similarity matrix needs m >= 2");
  if (values.size() != m * m)
    throw DataError(where + ": matrix has wrong element count");
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(at(i, i) - 1.0) > 1e-12)
      throw DataError(where + ": matrix diagonal must be 1");
    for (std::size_t j = 0; j < m; ++j) {
      const double v = at(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw DataError(where + ": matrix entry out of [0,1]");
      if (std::abs(v - at(j, i)) > 1e-12)
        throw DataError(where + ": matrix is not symmetric");
    }
  }
}

SimilarityMatrix similarity_matrix(const QueryGroup& group,
                                   const std::string& metric) {
  if (!is_known_metric(metric))
    throw UsageError("unknown similarity metric '" + metric + "'");
  const std::size_t m = group.samples.size();
  if (m < 2)
    throw UsageError("similarity_matrix: group '" + group.query_id +
                     "' needs at least 2 samples");

  SimilarityMatrix out;
  out.metric = metric;
  out.m = m;
  out.values.assign(m * m, 0.0);

  if (metric == "sql-output-type") {
    std::vector<SqlShape> shapes(m);
    for (std::size_t i = 0; i < m; ++i) {
      try {
        shapes[i] = sql_output_type(group.samples[i].text);
      } catch (const DataError& e) {
        throw DataError("group '" + group.query_id + "' sample " +
                        std::to_string(i) + ": " + e.what());
      }
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        const double s = shapes[i] == shapes[j] ? 1.0 : 0.0;
        out.at(i, j) = s;
        out.at(j, i) = s;
      }
  } else {
    std::vector<TokenSeq> tokens(m);
    for (std::size_t i = 0; i < m; ++i)
      tokens[i] = tokenize(group.samples[i].text);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        double s = 0.0;
        if (metric == "jaccard")
          s = jaccard(tokens[i], tokens[j]);
        else if (metric == "rouge1")
          s = rouge1(tokens[i], tokens[j]);
        else
          s = rougeL(tokens[i], tokens[j]);
        out.at(i, j) = s;
        out.at(j, i) = s;
      }
  }
  for (std::size_t i = 0; i < m; ++i) out.at(i, i) = 1.0;
  return out;
}

void save_matrices(const std::map<std::string, SimilarityMatrix>& matrices,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write matrices file: " + path);
  for (const auto& [query_id, matrix] : matrices) {
    Json j;
    j["query_id"] = query_id;
    j["metric"] = matrix.metric;
    j["m"] = matrix.m;
    Json rows = Json::array();
    for (std::size_t i = 0; i < matrix.m; ++i) {
      Json row = Json::array();
      for (std::size_t k = 0; k < matrix.m; ++k) row.push_back(matrix.at(i, k));
      rows.push_back(std::move(row));
    }
    j["values"] = std::move(rows);
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::map<std::string, SimilarityMatrix> load_matrices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open matrices file: " + path);
  std::map<std::string, SimilarityMatrix> matrices;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::string query_id;
    SimilarityMatrix matrix;
    try {
      const Json j = Json::parse(line);
      query_id = j.at("query_id").get<std::string>();
      matrix.metric = j.at("metric").get<std::string>();
      matrix.m = j.at("m").get<std::size_t>();
      for (const Json& row : j.at("values"))
        for (const Json& v : row) matrix.values.push_back(v.get<double>());
    } catch (const Json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    matrix.validate(where);
    if (!matrices.emplace(query_id, std::move(matrix)).second)
      throw DataError(where + ": duplicate matrix for query '" + query_id +
                      "'");
  }
  return matrices;
}

}  // namespace simconf
