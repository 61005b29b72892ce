#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "simconf/corpus.hpp"

namespace simconf {

// Multi-temperature sampling plan. Temperatures must be strictly
// increasing; samples at the lowest eval_temperature_count temperatures are
// flagged for evaluation.
struct SamplingPlan {
  std::vector<double> temperatures = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  int samples_per_temperature = 5;
  int top_k = 20;
  double top_p = 0.7;
  int max_new_tokens = 200;
  int eval_temperature_count = 3;
};

void validate_plan(const SamplingPlan& plan);

struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8080";  // scheme://host[:port]
  std::string model_name;
  std::string api_key;  // environment-sourced; never logged
  double timeout_seconds = 120.0;
  int retries = 2;
};

// Request transport, swappable so every network path is testable offline.
class Transport {
 public:
  virtual ~Transport() = default;
  // POSTs a JSON body, returns the response body. Throws DataError on
  // transport failures and non-2xx statuses.
  virtual std::string post_json(const std::string& path,
                                const std::string& body) = 0;
};

// Live HTTP transport (cpp-httplib; TLS when built with OpenSSL).
std::unique_ptr<Transport> make_http_transport(const EndpointConfig& config);

// Tees request/response pairs through to a JSONL fixture file.
class RecordingTransport final : public Transport {
 public:
  RecordingTransport(std::unique_ptr<Transport> inner, std::string path);
  std::string post_json(const std::string& path,
                        const std::string& body) override;

 private:
  std::unique_ptr<Transport> inner_;
  std::string fixture_path_;
  std::mutex mutex_;
};

// Serves responses from a recorded fixture. Identical requests are served
// in recording order (FIFO), so replayed runs reproduce recorded samples
// byte for byte.
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(const std::string& fixture_path);
  std::string post_json(const std::string& path,
                        const std::string& body) override;

 private:
  std::map<std::string, std::deque<std::string>> responses_;
  std::mutex mutex_;
};

struct SampleBatch {
  std::vector<Sample> samples;  // canonical order
  std::vector<std::string> warnings;
};

// OpenAI-compatible completions client.
class CompletionClient {
 public:
  // transport == nullptr builds a live HTTP transport from the config.
  explicit CompletionClient(EndpointConfig config,
                            std::unique_ptr<Transport> transport = nullptr);

  // |temperatures| x samples_per_temperature generations for one query.
  // The template's {query} placeholder is substituted. avg_logprob is the
  // mean of returned token log-probabilities and stays unset (with a
  // warning) when the endpoint does not provide them.
  SampleBatch sample_generations(const SamplingPlan& plan,
                                 const std::string& query,
                                 const std::string& prompt_template) const;

  // True/False self-judgment at temperature 0: the probability of the
  // emitted True token, or 1 - probability of the emitted False token.
  // DataError when the first token is neither.
  double p_true_score(const std::string& query, const std::string& generation,
                      const std::string& context) const;

  const EndpointConfig& config() const { return config_; }

 private:
  std::string post_with_retries(const std::string& body,
                                const std::string& context) const;

  EndpointConfig config_;
  std::unique_ptr<Transport> transport_;
};

// The completions endpoint path used for every request.
inline constexpr const char* kCompletionsPath = "/v1/completions";

}  // namespace simconf
