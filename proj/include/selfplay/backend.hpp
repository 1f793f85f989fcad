// Inference-only adapter that runs the propose-solve-score loop against a
// chat-completions endpoint. No parameter updates ever happen here; rounds
// are scored with the exact same reward path as the simulator. A fixture
// transport makes the whole module testable offline.
#pragma once

#include "selfplay/rewards.hpp"
#include "selfplay/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace selfplay {

struct BackendConfig {
  std::string base_url;                  // e.g. http://localhost:8000
  std::string model_name;
  std::string completions_path = "/v1/chat/completions";
  std::string api_key_env = "BACKEND_API_KEY";  // empty means no key required
  std::string api_key;                   // resolved from the environment
  int n_answers = 5;
  double solver_temperature = 1.0;
  double proposer_temperature = 1.0;
  double request_timeout_seconds = 60.0;
  int max_retries = 2;                   // attempts = max_retries + 1
  std::string proposer_prompt_template =
      "Look at the attached image and generate one visually grounded "
      "mathematical question about it. Reply with the question only.";
  std::string solver_prompt_template =
      "Answer the following question about the attached image: {question}\n"
      "Think briefly, then end your reply with <answer>...</answer>.";
};

// remote=true additionally checks the endpoint fields and the API key.
void validate(const BackendConfig& config, bool remote);

// Transport failure or malformed response; the offending payload rides along.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& message, std::string payload)
      : std::runtime_error(message), payload_(std::move(payload)) {}
  const std::string& payload() const { return payload_; }

 private:
  std::string payload_;
};

// One request attempt. Retrying lives above this interface so a fixture can
// model each attempt individually.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual nlohmann::json post_chat(const nlohmann::json& request) = 0;
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const BackendConfig& config);
  nlohmann::json post_chat(const nlohmann::json& request) override;

 private:
  std::string base_url_;
  std::string path_;
  std::string api_key_;
  double timeout_seconds_;
};

// Replays a recorded fixture: a JSON array of {"request": ..., "response": ...}
// or {"request": ..., "error": "..."} entries, consumed one per attempt.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(nlohmann::json entries);
  static FixtureTransport from_file(const std::filesystem::path& path);
  nlohmann::json post_chat(const nlohmann::json& request) override;
  std::size_t remaining() const;

 private:
  nlohmann::json entries_;
  std::size_t cursor_ = 0;
};

// Wraps another transport and records every attempt for later replay.
class RecordingTransport final : public Transport {
 public:
  explicit RecordingTransport(Transport& inner) : inner_(&inner) {}
  nlohmann::json post_chat(const nlohmann::json& request) override;
  const nlohmann::json& recorded() const { return recorded_; }
  void save(const std::filesystem::path& path) const;

 private:
  Transport* inner_;
  nlohmann::json recorded_ = nlohmann::json::array();
};

nlohmann::json build_chat_request(const BackendConfig& config, std::string_view prompt,
                                  std::string_view image_ref, double temperature);

// Extracts choices[0].message.content; throws BackendError on anything else.
std::string completion_text(const nlohmann::json& response);

// One proposer call: returns the generated question verbatim.
std::string propose_question(Transport& transport, std::string_view image_ref,
                             const BackendConfig& config);

struct SampledAnswers {
  std::vector<std::string> texts;  // successful generations, in request order
  int n_requested = 0;
  int n_failed = 0;
  bool partial() const { return n_failed > 0; }
};

// N solver completions. Individual request failures degrade the round to the
// successful subset; only a fully failed round throws.
SampledAnswers sample_answers(Transport& transport, std::string_view image_ref,
                              std::string_view question, const BackendConfig& config);

struct BackendRound {
  StepRecord record;  // trainer-state fields zeroed, difficulty_bin = -1
  std::string question;
  SampledAnswers answers;
};

// Chains propose -> sample -> score through the shared reward path.
BackendRound score_round(Transport& transport, std::string_view image_ref,
                         const BackendConfig& config, const SolverRewardParams& solver_params,
                         const ProposerRewardParams& proposer_params, int round_index);

// StepRecord JSON plus the backend origin tag.
nlohmann::json backend_round_to_json(const BackendRound& round);

}  // namespace selfplay
