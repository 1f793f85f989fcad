// Step-log serialization (one JSON object per line), run summaries, and the
// run manifest. Summaries are pure functions of the step log so they can be
// recomputed offline from steps.jsonl alone.
#pragma once

#include "selfplay/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace selfplay {

nlohmann::json step_record_to_json(const StepRecord& record);
StepRecord step_record_from_json(const nlohmann::json& j);

void write_steps_jsonl(const std::filesystem::path& path, const std::vector<StepRecord>& records);
std::vector<StepRecord> read_steps_jsonl(const std::filesystem::path& path);

struct SummaryParams {
  double mu_h = 0.90;       // entropy band center for the mid-band share
  double sigma_h = 0.35;    // band half-width
  int n_bins = 8;           // difficulty histogram size
  int variance_window = 100;  // window length for the stability metrics
};

// Overall means, the zero-advantage-step fraction, windowed proposer-reward
// variance, and first/last-decile difficulty histograms with mid-band shares.
nlohmann::json summarize_records(const std::vector<StepRecord>& records,
                                 const SummaryParams& params);

// Written once at run start; the finish timestamp is therefore null.
nlohmann::json make_manifest(const nlohmann::json& merged_config, std::uint64_t seed,
                             const std::vector<std::string>& output_files);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace selfplay
