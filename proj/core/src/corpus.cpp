#include "simconf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "simconf/error.hpp"
#include "simconf/rng.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

namespace {

Sample sample_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": sample must be an object");
  Sample s;
  try {
    s.text = j.at("text").get<std::string>();
    s.temperature = j.at("temperature").get<double>();
    s.sample_index = j.at("sample_index").get<int>();
  } catch (const Json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
  if (s.temperature < 0.0)
    throw DataError(where + ": temperature must be >= 0");
  if (s.sample_index < 0)
    throw DataError(where + ": sample_index must be >= 0");
  if (j.contains("avg_logprob") && !j["avg_logprob"].is_null()) {
    if (!j["avg_logprob"].is_number())
      throw DataError(where + ": avg_logprob must be a number");
    s.avg_logprob = j["avg_logprob"].get<double>();
    if (*s.avg_logprob > 0.0)
      throw DataError(where + ": avg_logprob must be <= 0");
  }
  if (j.contains("reward") && !j["reward"].is_null()) {
    if (!j["reward"].is_number_integer())
      throw DataError(where + ": reward must be 0 or 1");
    const int r = j["reward"].get<int>();
    if (r != 0 && r != 1) throw DataError(where + ": reward must be 0 or 1");
    s.reward = r;
  }
  // eval_flag defaults to true when omitted.
  if (j.contains("eval_flag")) {
    if (!j["eval_flag"].is_boolean())
      throw DataError(where + ": eval_flag must be a boolean");
    s.eval_flag = j["eval_flag"].get<bool>();
  }
  return s;
}

Json sample_to_json(const Sample& s) {
  Json j;
  j["text"] = s.text;
  j["temperature"] = s.temperature;
  j["sample_index"] = s.sample_index;
  if (s.avg_logprob) j["avg_logprob"] = *s.avg_logprob;
  if (s.reward) j["reward"] = *s.reward;
  j["eval_flag"] = s.eval_flag;
  return j;
}

}  // namespace

void canonicalize_samples(QueryGroup& group) {
  std::stable_sort(group.samples.begin(), group.samples.end(),
                   [](const Sample& a, const Sample& b) {
                     return std::tie(a.temperature, a.sample_index) <
                            std::tie(b.temperature, b.sample_index);
                   });
  for (std::size_t i = 1; i < group.samples.size(); ++i) {
    const Sample& prev = group.samples[i - 1];
    const Sample& cur = group.samples[i];
    if (prev.temperature == cur.temperature &&
        prev.sample_index == cur.sample_index) {
      std::ostringstream msg;
      msg << "group '" << group.query_id << "': duplicate (temperature="
          << cur.temperature << ", sample_index=" << cur.sample_index << ")";
      throw DataError(msg.str());
    }
  }
}

void validate_group(const QueryGroup& group, const std::string& where) {
  if (group.query_id.empty())
    throw DataError(where + ": query_id must be non-empty");
  if (group.samples.size() < 2)
    throw DataError(where + ": group '" + group.query_id +
                    "' needs at least 2 samples");
  bool any_eval = false;
  for (const Sample& s : group.samples) any_eval = any_eval || s.eval_flag;
  if (!any_eval)
    throw DataError(where + ": group '" + group.query_id +
                    "' has no sample with eval_flag=true");
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);

  Corpus corpus;
  bool task_label_seen = false;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);

    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw DataError(where + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(where + ": expected a JSON object");

    QueryGroup group;
    try {
      group.query_id = j.at("query_id").get<std::string>();
      group.query = j.value("query", std::string{});
      if (j.contains("references"))
        group.references = j["references"].get<std::vector<std::string>>();
      if (!j.contains("samples") || !j["samples"].is_array())
        throw DataError(where + ": missing samples array");
    } catch (const Json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    for (const Json& js : j["samples"])
      group.samples.push_back(sample_from_json(js, where));

    if (!seen_ids.insert(group.query_id).second)
      throw DataError(where + ": duplicate query_id '" + group.query_id + "'");

    canonicalize_samples(group);
    validate_group(group, where);

    if (!task_label_seen && j.contains("task_label") &&
        j["task_label"].is_string()) {
      corpus.task_label = j["task_label"].get<std::string>();
      task_label_seen = true;
    }
    corpus.groups.push_back(std::move(group));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const QueryGroup& g : corpus.groups) {
    Json j;
    j["query_id"] = g.query_id;
    j["query"] = g.query;
    j["references"] = g.references;
    j["task_label"] = corpus.task_label;
    Json samples = Json::array();
    for (const Sample& s : g.samples) samples.push_back(sample_to_json(s));
    j["samples"] = std::move(samples);
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

SplitAssignment split_train_test(const Corpus& corpus, double fraction,
                                 std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw UsageError("split fraction must lie in (0, 1]");

  std::vector<std::string> ids;
  ids.reserve(corpus.groups.size());
  for (const QueryGroup& g : corpus.groups) ids.push_back(g.query_id);
  std::sort(ids.begin(), ids.end());

  Rng rng(seed);
  rng.shuffle(ids);

  const std::size_t train_count =
      static_cast<std::size_t>(std::floor(fraction * ids.size()));
  SplitAssignment split;
  split.seed = seed;
  split.fraction = fraction;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i < train_count)
      split.train_ids.insert(ids[i]);
    else
      split.test_ids.insert(ids[i]);
  }
  return split;
}

void write_scores(const std::string& path, std::vector<ScoreRecord> scored) {
  for (const ScoreRecord& r : scored) {
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0))
      throw UsageError("confidence out of [0,1] for query '" + r.query_id +
                       "'");
  }
  std::sort(scored.begin(), scored.end(),
            [](const ScoreRecord& a, const ScoreRecord& b) {
              return std::tie(a.query_id, a.temperature, a.sample_index) <
                     std::tie(b.query_id, b.temperature, b.sample_index);
            });
  std::ofstream out(path);
  if (!out) throw DataError("cannot write scores file: " + path);
  for (const ScoreRecord& r : scored) {
    Json j;
    j["query_id"] = r.query_id;
    j["sample_index"] = r.sample_index;
    j["temperature"] = r.temperature;
    j["confidence"] = r.confidence;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<ScoreRecord> load_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scores file: " + path);
  std::vector<ScoreRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    try {
      const Json j = Json::parse(line);
      ScoreRecord r;
      r.query_id = j.at("query_id").get<std::string>();
      r.sample_index = j.at("sample_index").get<int>();
      r.temperature = j.at("temperature").get<double>();
      r.confidence = j.at("confidence").get<double>();
      records.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return records;
}

}  // namespace simconf
