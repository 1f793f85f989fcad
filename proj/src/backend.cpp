#include "selfplay/backend.hpp"

#include "selfplay/metrics.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>
#include <fstream>

namespace selfplay {

void validate(const BackendConfig& config, bool remote) {
  if (config.n_answers < 2) throw std::invalid_argument("backend.n_answers must be >= 2");
  if (!(config.solver_temperature > 0.0) || !(config.proposer_temperature > 0.0))
    throw std::invalid_argument("backend temperatures must be > 0");
  if (!(config.request_timeout_seconds > 0.0))
    throw std::invalid_argument("backend.request_timeout_seconds must be > 0");
  if (config.max_retries < 0) throw std::invalid_argument("backend.max_retries must be >= 0");
  if (config.solver_prompt_template.find("{question}") == std::string::npos)
    throw std::invalid_argument(
        "backend.solver_prompt_template must contain the {question} placeholder");
  if (remote) {
    if (config.base_url.empty()) throw std::invalid_argument("backend.base_url is required");
    if (config.model_name.empty()) throw std::invalid_argument("backend.model_name is required");
    if (!config.api_key_env.empty() && config.api_key.empty())
      throw std::invalid_argument("API key environment variable " + config.api_key_env +
                                  " is not set (set backend.api_key_env to \"\" for keyless "
                                  "endpoints)");
  }
}

HttpTransport::HttpTransport(const BackendConfig& config)
    : base_url_(config.base_url),
      path_(config.completions_path),
      api_key_(config.api_key),
      timeout_seconds_(config.request_timeout_seconds) {}

nlohmann::json HttpTransport::post_chat(const nlohmann::json& request) {
  httplib::Client client(base_url_);
  const auto timeout = std::chrono::milliseconds(static_cast<long>(timeout_seconds_ * 1000.0));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto res = client.Post(path_, headers, request.dump(), "application/json");
  if (!res)
    throw BackendError("transport failure: " + httplib::to_string(res.error()), request.dump());
  if (res->status < 200 || res->status >= 300)
    throw BackendError("HTTP " + std::to_string(res->status), res->body);
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed response body: ") + e.what(), res->body);
  }
}

FixtureTransport::FixtureTransport(nlohmann::json entries) : entries_(std::move(entries)) {
  if (!entries_.is_array()) throw std::invalid_argument("fixture must be a JSON array");
}

FixtureTransport FixtureTransport::from_file(const std::filesystem::path& path) {
  return FixtureTransport(read_json(path));
}

nlohmann::json FixtureTransport::post_chat(const nlohmann::json& request) {
  if (cursor_ >= entries_.size())
    throw BackendError("fixture exhausted after " + std::to_string(cursor_) + " attempts",
                       request.dump());
  const nlohmann::json& entry = entries_[cursor_++];
  if (entry.contains("error"))
    throw BackendError(entry["error"].get<std::string>(),
                       entry.value("payload", nlohmann::json()).dump());
  return entry.at("response");
}

std::size_t FixtureTransport::remaining() const { return entries_.size() - cursor_; }

nlohmann::json RecordingTransport::post_chat(const nlohmann::json& request) {
  nlohmann::json entry;
  entry["request"] = request;
  try {
    entry["response"] = inner_->post_chat(request);
    recorded_.push_back(entry);
    return entry["response"];
  } catch (const BackendError& e) {
    entry["error"] = e.what();
    entry["payload"] = e.payload();
    recorded_.push_back(entry);
    throw;
  }
}

void RecordingTransport::save(const std::filesystem::path& path) const {
  write_json(path, recorded_);
}

nlohmann::json build_chat_request(const BackendConfig& config, std::string_view prompt,
                                  std::string_view image_ref, double temperature) {
  nlohmann::json content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", std::string(prompt)}});
  content.push_back(
      {{"type", "image_url"}, {"image_url", {{"url", std::string(image_ref)}}}});
  nlohmann::json request;
  request["model"] = config.model_name;
  request["temperature"] = temperature;
  request["messages"] = nlohmann::json::array({
      {{"role", "user"}, {"content", content}},
  });
  return request;
}

std::string completion_text(const nlohmann::json& response) {
  try {
    const auto& content = response.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    if (content.is_array()) {  // some servers return content parts
      std::string text;
      for (const auto& part : content)
        if (part.value("type", "") == "text") text += part.value("text", "");
      return text;
    }
    throw BackendError("unsupported content shape", response.dump());
  } catch (const nlohmann::json::exception&) {
    throw BackendError("malformed response body", response.dump());
  }
}

namespace {

nlohmann::json post_with_retries(Transport& transport, const nlohmann::json& request,
                                 int max_retries) {
  for (int attempt = 0;; ++attempt) {
    try {
      return transport.post_chat(request);
    } catch (const BackendError&) {
      if (attempt >= max_retries) throw;
    }
  }
}

std::string render_solver_prompt(const BackendConfig& config, std::string_view question) {
  std::string prompt = config.solver_prompt_template;
  const auto pos = prompt.find("{question}");
  prompt.replace(pos, std::string_view("{question}").size(), question);
  return prompt;
}

}  // namespace

std::string propose_question(Transport& transport, std::string_view image_ref,
                             const BackendConfig& config) {
  const auto request = build_chat_request(config, config.proposer_prompt_template, image_ref,
                                          config.proposer_temperature);
  return completion_text(post_with_retries(transport, request, config.max_retries));
}

SampledAnswers sample_answers(Transport& transport, std::string_view image_ref,
                              std::string_view question, const BackendConfig& config) {
  const std::string prompt = render_solver_prompt(config, question);
  SampledAnswers answers;
  answers.n_requested = config.n_answers;
  std::string first_error;
  for (int i = 0; i < config.n_answers; ++i) {
    const auto request =
        build_chat_request(config, prompt, image_ref, config.solver_temperature);
    try {
      answers.texts.push_back(completion_text(post_with_retries(transport, request, config.max_retries)));
    } catch (const BackendError& e) {
      ++answers.n_failed;
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (answers.texts.empty())
    throw BackendError("all " + std::to_string(config.n_answers) +
                           " answer requests failed; first error: " + first_error,
                       std::string(question));
  return answers;
}

BackendRound score_round(Transport& transport, std::string_view image_ref,
                         const BackendConfig& config, const SolverRewardParams& solver_params,
                         const ProposerRewardParams& proposer_params, int round_index) {
  BackendRound round;
  round.question = propose_question(transport, image_ref, config);
  round.answers = sample_answers(transport, image_ref, round.question, config);

  std::vector<std::optional<AnswerSample>> generations;
  generations.reserve(round.answers.texts.size());
  for (const auto& text : round.answers.texts) generations.push_back(extract_answer(text));
  const RoundScore score = score_samples(generations, config.n_answers, solver_params,
                                         proposer_params, SolverRewardKind::kContinuous);

  round.record.step = round_index;
  round.record.difficulty_bin = -1;  // no bin concept outside the simulator
  round.record.entropy_nats = score.entropy_nats;
  round.record.solver_rewards = score.solver_rewards;
  round.record.proposer_reward = score.proposer_reward;
  round.record.majority_fraction = score.majority_fraction;
  return round;
}

nlohmann::json backend_round_to_json(const BackendRound& round) {
  nlohmann::json j = step_record_to_json(round.record);
  j["origin"] = "backend";
  return j;
}

}  // namespace selfplay
