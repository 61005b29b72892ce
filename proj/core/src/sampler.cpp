#include "simconf/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "simconf/error.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

namespace {

// Canonical request key: sorted-key JSON dump, so field order never affects
// fixture matching.
std::string request_key(const std::string& path, const std::string& body) {
  try {
    return path + "\n" + nlohmann::json::parse(body).dump();
  } catch (const nlohmann::json::exception&) {
    return path + "\n" + body;
  }
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string substitute(const std::string& text, const std::string& placeholder,
                       const std::string& value) {
  std::string out = text;
  std::size_t pos = 0;
  while ((pos = out.find(placeholder, pos)) != std::string::npos) {
    out.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
  return out;
}

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(EndpointConfig config) : config_(std::move(config)) {}

  std::string post_json(const std::string& path,
                        const std::string& body) override {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(config_.timeout_seconds * 1000)));
    client.set_read_timeout(std::chrono::milliseconds(
        static_cast<int>(config_.timeout_seconds * 1000)));
    httplib::Headers headers;
    if (!config_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res)
      throw DataError("transport error for " + config_.base_url + path +
                      ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw DataError("HTTP " + std::to_string(res->status) + " from " +
                      config_.base_url + path + ": " + res->body);
    return res->body;
  }

 private:
  EndpointConfig config_;
};

Json parse_response(const std::string& body, const std::string& context) {
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw DataError("invalid JSON response (" + context + "): " + e.what());
  }
}

const Json& first_choice(const Json& response, const std::string& context) {
  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty())
    throw DataError("response has no choices (" + context + ")");
  return response["choices"][0];
}

// Mean of the numeric entries of logprobs.token_logprobs; nullopt when the
// endpoint returned none.
std::optional<double> mean_token_logprob(const Json& choice) {
  if (!choice.contains("logprobs") || choice["logprobs"].is_null())
    return std::nullopt;
  const Json& lp = choice["logprobs"];
  if (!lp.contains("token_logprobs") || !lp["token_logprobs"].is_array())
    return std::nullopt;
  double sum = 0.0;
  std::size_t count = 0;
  for (const Json& v : lp["token_logprobs"]) {
    if (v.is_number()) {
      sum += v.get<double>();
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace

void validate_plan(const SamplingPlan& plan) {
  if (plan.temperatures.empty())
    throw UsageError("sampling plan needs at least one temperature");
  for (std::size_t i = 0; i < plan.temperatures.size(); ++i) {
    if (plan.temperatures[i] < 0.0)
      throw UsageError("temperatures must be >= 0");
    if (i > 0 && plan.temperatures[i] <= plan.temperatures[i - 1])
      throw UsageError("temperatures must be strictly increasing");
  }
  if (plan.samples_per_temperature < 1)
    throw UsageError("samples_per_temperature must be >= 1");
  if (plan.eval_temperature_count < 1 ||
      static_cast<std::size_t>(plan.eval_temperature_count) >
          plan.temperatures.size())
    throw UsageError("eval_temperature_count must be in [1, #temperatures]");
  if (plan.max_new_tokens < 1)
    throw UsageError("max_new_tokens must be >= 1");
}

std::unique_ptr<Transport> make_http_transport(const EndpointConfig& config) {
  return std::make_unique<HttpTransport>(config);
}

RecordingTransport::RecordingTransport(std::unique_ptr<Transport> inner,
                                       std::string path)
    : inner_(std::move(inner)), fixture_path_(std::move(path)) {
  if (!inner_) throw UsageError("RecordingTransport needs an inner transport");
  std::ofstream out(fixture_path_, std::ios::trunc);
  if (!out) throw DataError("cannot write fixture file: " + fixture_path_);
}

std::string RecordingTransport::post_json(const std::string& path,
                                          const std::string& body) {
  const std::string response = inner_->post_json(path, body);
  Json line;
  line["path"] = path;
  line["request"] = Json::parse(body);
  line["response"] = Json::parse(response);
  std::lock_guard<std::mutex> lock(mutex_);
  std::ofstream out(fixture_path_, std::ios::app);
  if (!out) throw DataError("cannot append to fixture file: " + fixture_path_);
  out << line.dump() << '\n';
  return response;
}

ReplayTransport::ReplayTransport(const std::string& fixture_path) {
  std::ifstream in(fixture_path);
  if (!in) throw DataError("cannot open fixture file: " + fixture_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      const std::string key = request_key(j.at("path").get<std::string>(),
                                          j.at("request").dump());
      responses_[key].push_back(j.at("response").dump());
    } catch (const Json::exception& e) {
      throw DataError(fixture_path + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
}

std::string ReplayTransport::post_json(const std::string& path,
                                       const std::string& body) {
  const std::string key = request_key(path, body);
  std::lock_guard<std::mutex> lock(mutex_);
  const auto it = responses_.find(key);
  if (it == responses_.end() || it->second.empty())
    throw DataError("replay fixture has no (more) responses for request: " +
                    key.substr(0, 200));
  const std::string response = it->second.front();
  it->second.pop_front();
  return response;
}

CompletionClient::CompletionClient(EndpointConfig config,
                                   std::unique_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) transport_ = make_http_transport(config_);
}

std::string CompletionClient::post_with_retries(
    const std::string& body, const std::string& context) const {
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    try {
      return transport_->post_json(kCompletionsPath, body);
    } catch (const DataError& e) {
      last_error = e.what();
    }
  }
  throw DataError("request failed after " +
                  std::to_string(config_.retries + 1) + " attempts (" +
                  context + "): " + last_error);
}

SampleBatch CompletionClient::sample_generations(
    const SamplingPlan& plan, const std::string& query,
    const std::string& prompt_template) const {
  validate_plan(plan);
  if (prompt_template.find("{query}") == std::string::npos)
    throw UsageError("prompt template must contain a {query} placeholder");
  const std::string prompt = substitute(prompt_template, "{query}", query);

  SampleBatch batch;
  for (std::size_t t = 0; t < plan.temperatures.size(); ++t) {
    const double temperature = plan.temperatures[t];
    const bool eval_flag =
        t < static_cast<std::size_t>(plan.eval_temperature_count);
    for (int idx = 0; idx < plan.samples_per_temperature; ++idx) {
      Json request;
      request["model"] = config_.model_name;
      request["prompt"] = prompt;
      request["temperature"] = temperature;
      request["top_p"] = plan.top_p;
      request["top_k"] = plan.top_k;
      request["max_tokens"] = plan.max_new_tokens;
      request["logprobs"] = 1;

      std::ostringstream context;
      context << "temperature=" << temperature << " sample_index=" << idx;
      const std::string body =
          post_with_retries(request.dump(), context.str());
      const Json response = parse_response(body, context.str());
      const Json& choice = first_choice(response, context.str());

      Sample sample;
      sample.text = choice.value("text", std::string{});
      sample.temperature = temperature;
      sample.sample_index = idx;
      sample.eval_flag = eval_flag;
      const std::optional<double> alp = mean_token_logprob(choice);
      if (!alp) {
        batch.warnings.push_back("no token log-probabilities (" +
                                 context.str() + ")");
      } else if (*alp > 0.0) {
        batch.warnings.push_back("positive avg logprob ignored (" +
                                 context.str() + ")");
      } else {
        sample.avg_logprob = alp;
      }
      batch.samples.push_back(std::move(sample));
    }
  }
  return batch;
}

double CompletionClient::p_true_score(const std::string& query,
                                      const std::string& generation,
                                      const std::string& context) const {
  std::ostringstream prompt;
  prompt << "Instructions:\n"
         << "1. You are given an input question and a generated response. "
            "Determine if the response is correct with respect to the "
            "question.\n"
         << "2. Your output must be only True or False, with no extra "
            "formatting.\n";
  if (!context.empty()) prompt << "3. Additional context: " << context << "\n";
  prompt << "\nTrue or False?\n"
         << "Input: " << query << "\n"
         << "Response: " << generation << "\n"
         << "Output:";

  Json request;
  request["model"] = config_.model_name;
  request["prompt"] = prompt.str();
  request["temperature"] = 0.0;  // deterministic judgment
  request["max_tokens"] = 4;
  request["logprobs"] = 1;

  const std::string body = post_with_retries(request.dump(), "p(true)");
  const Json response = parse_response(body, "p(true)");
  const Json& choice = first_choice(response, "p(true)");

  // First generated token and its probability.
  std::string token;
  double token_prob = -1.0;
  if (choice.contains("logprobs") && !choice["logprobs"].is_null()) {
    const Json& lp = choice["logprobs"];
    if (lp.contains("tokens") && lp["tokens"].is_array() &&
        !lp["tokens"].empty())
      token = lp["tokens"][0].get<std::string>();
    if (lp.contains("token_logprobs") && lp["token_logprobs"].is_array() &&
        !lp["token_logprobs"].empty() && lp["token_logprobs"][0].is_number())
      token_prob = std::exp(lp["token_logprobs"][0].get<double>());
  }
  if (token.empty()) {
    const std::string text = trim(choice.value("text", std::string{}));
    token = text.substr(0, text.find_first_of(" \t\r\n"));
  }
  if (token_prob < 0.0)
    throw DataError("p(true): endpoint returned no token log-probability");

  const std::string word = lower(trim(token));
  if (word == "true") return std::min(1.0, token_prob);
  if (word == "false") return 1.0 - std::min(1.0, token_prob);
  throw DataError("p(true): judge answered '" + trim(token) +
                  "' (expected True or False)");
}

}  // namespace simconf
