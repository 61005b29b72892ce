#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "simconf/corpus.hpp"
#include "simconf/rng.hpp"

namespace simconf::testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("simconf-test-" + std::to_string(stamp) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Random text over a small vocabulary; includes punctuation-bearing words so
// tokenization paths get exercised.
inline std::string random_text(Rng& rng, std::size_t min_words = 1,
                               std::size_t max_words = 12) {
  static const std::vector<std::string> vocab = {
      "the",   "cat",   "sat",  "on",     "a",     "mat",  "select",
      "count", "from",  "blue", "orange", "query", "runs", "fast,",
      "(now)", "done.", "it's", "Z"};
  const std::size_t n =
      min_words + static_cast<std::size_t>(rng.below(max_words - min_words + 1));
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += vocab[static_cast<std::size_t>(rng.below(vocab.size()))];
  }
  return out;
}

// Small rewarded group with one sample per index at a single temperature.
inline QueryGroup make_group(const std::string& id,
                             const std::vector<std::string>& texts,
                             const std::vector<int>& rewards = {}) {
  QueryGroup group;
  group.query_id = id;
  group.query = "query " + id;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Sample s;
    s.text = texts[i];
    s.temperature = 1.0;
    s.sample_index = static_cast<int>(i);
    if (!rewards.empty()) s.reward = rewards[i];
    group.samples.push_back(std::move(s));
  }
  return group;
}

}  // namespace simconf::testutil
