#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lss/codecs.hpp"
#include "lss/latent.hpp"
#include "lss/manipulations.hpp"
#include "lss/schedule.hpp"

namespace lss {

struct TrialRecord {
  std::string utterance_id;
  std::string condition;  // manipulation string, "+wrong_key" / "+wrong_nonce" for mismatched tracks
  bool watermarked = false;
  bool key_match = false;
  double score = 0.0;
};

struct ConditionSummary {
  std::string condition;
  double auc = 0.0;
  long n_pos = 0;
  long n_neg = 0;
  std::optional<std::string> error;  // set when the condition could not complete
};

/// Per-utterance nonces are derive_nonce(key, utterance id); the wrong
/// nonce track uses derive_nonce(key, "wrong-nonce:" + id).
struct ExperimentConfig {
  SecretKey key;
  SecretKey wrong_key;
  Payload payload;
  ScheduleParams params;
  CodecSpec codec;
  std::vector<ManipulationSpec> conditions;
  bool wrong_key_track = true;
  bool wrong_nonce_track = true;
  int threads = 1;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<ConditionSummary> summary;

  bool all_completed() const;
  const ConditionSummary* find(std::string_view condition) const;
};

/// Utterance source for the harness; `ids` and `corpus` are parallel.
struct LabeledCorpus {
  std::vector<std::string> ids;
  std::vector<LatentSequence> sequences;
};

/// For every utterance and condition: the watermarked utterance scored
/// with its own schedule is a positive, the unwatermarked utterance scored
/// with the same schedule a negative. Mismatched tracks score both with a
/// wrong key (or nonce). Every signal makes the round trip
/// unproject -> decode -> manipulate -> encode -> project, so the codec is
/// part of the channel. With an external_latents codec only the clean
/// condition is available.
ExperimentResult run_experiment(const LabeledCorpus& corpus, const PcaBasis& basis, const ExperimentConfig& config);

Nonce utterance_nonce(const SecretKey& key, std::string_view utterance_id);
Nonce wrong_utterance_nonce(const SecretKey& key, std::string_view utterance_id);

// CSV header: utt_id,condition,watermarked,key_match,score (RFC 4180 quoting).
std::string records_to_csv(std::span<const TrialRecord> records);
void write_records_csv(std::span<const TrialRecord> records, const std::filesystem::path& path);

// {condition: {auc, n_pos, n_neg[, error]}} in condition order.
std::string summary_to_json(std::span<const ConditionSummary> summary);

std::string csv_escape(std::string_view field);

}  // namespace lss
