#include "lss/evaluation.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "lss/auc.hpp"
#include "lss/error.hpp"
#include "lss/resample.hpp"
#include "lss/synthetic.hpp"
#include "lss/watermark.hpp"

namespace lss {

namespace {

enum class Track { kCorrect, kWrongKey, kWrongNonce };

std::string track_label(const std::string& condition, Track track) {
  switch (track) {
    case Track::kCorrect: return condition;
    case Track::kWrongKey: return condition + "+wrong_key";
    case Track::kWrongNonce: return condition + "+wrong_nonce";
  }
  return condition;
}

Bytes id_bytes(std::string_view prefix, std::string_view id) {
  Bytes out(prefix.begin(), prefix.end());
  out.insert(out.end(), id.begin(), id.end());
  return out;
}

/// decode -> manipulate -> encode, keeping the frame count.
LatentSequence channel(const LatentSequence& f, const ManipulationSpec& spec, const CodecSpec& codec,
                       std::uint64_t utterance_index) {
  if (codec.kind == CodecKind::kExternalLatents) {
    require(spec.kind == ManipulationKind::kClean, ErrorKind::kInvalidArgument,
            "condition '" + to_string(spec) + "' needs a waveform codec; external latents support only clean");
    return f;
  }
  const Waveform x = decode(f, codec);
  ManipulationSpec local = spec;
  local.seed = mix_seed(spec.seed, utterance_index);
  Waveform y = apply_manipulation(x, local);
  if (y.sample_rate_hz != x.sample_rate_hz) y = resample(y, x.sample_rate_hz);
  y.samples.resize(x.samples.size(), 0.0);
  return encode(y, codec);
}

struct UtteranceScores {
  // [condition][track] -> {watermarked score, unwatermarked score}
  std::vector<std::array<std::array<double, 2>, 3>> scores;
  std::vector<std::optional<std::string>> errors;
};

}  // namespace

Nonce utterance_nonce(const SecretKey& key, std::string_view utterance_id) {
  return derive_nonce(key, id_bytes("utterance:", utterance_id));
}

Nonce wrong_utterance_nonce(const SecretKey& key, std::string_view utterance_id) {
  return derive_nonce(key, id_bytes("wrong-nonce:", utterance_id));
}

bool ExperimentResult::all_completed() const {
  for (const auto& s : summary) {
    if (s.error) return false;
  }
  return true;
}

const ConditionSummary* ExperimentResult::find(std::string_view condition) const {
  for (const auto& s : summary) {
    if (s.condition == condition) return &s;
  }
  return nullptr;
}

ExperimentResult run_experiment(const LabeledCorpus& corpus, const PcaBasis& basis, const ExperimentConfig& config) {
  require(corpus.ids.size() == corpus.sequences.size(), ErrorKind::kInvalidArgument,
          "corpus ids and sequences differ in length");
  require(!corpus.sequences.empty(), ErrorKind::kInvalidArgument, "experiment corpus is empty");
  require(!config.conditions.empty(), ErrorKind::kInvalidArgument, "experiment needs at least one condition");
  config.params.validate(static_cast<long>(basis.dim()));
  config.codec.validate();
  for (const auto& f : corpus.sequences) {
    require(f.dim() == basis.dim(), ErrorKind::kDimension,
            "corpus dimension " + std::to_string(f.dim()) + " does not match basis dimension " +
                std::to_string(basis.dim()));
  }

  const std::size_t num_utts = corpus.sequences.size();
  const std::size_t num_conditions = config.conditions.size();
  std::vector<UtteranceScores> per_utt(num_utts);

  auto process = [&](std::size_t u) {
    UtteranceScores& out = per_utt[u];
    out.scores.assign(num_conditions, {});
    out.errors.assign(num_conditions, std::nullopt);

    const LatentSequence& f = corpus.sequences[u];
    const std::string& id = corpus.ids[u];
    const ProjectedSequence z = project(f, basis);
    const long frames = z.frames();
    const Nonce nonce = utterance_nonce(config.key, id);
    const WatermarkSchedule schedule = derive_schedule(config.key, nonce, config.payload, config.params, frames);
    const LatentSequence marked = unproject(embed(z, schedule), basis);

    std::optional<WatermarkSchedule> wrong_key, wrong_nonce;
    if (config.wrong_key_track) {
      wrong_key = derive_schedule(config.wrong_key, nonce, config.payload, config.params, frames);
    }
    if (config.wrong_nonce_track) {
      wrong_nonce = derive_schedule(config.key, wrong_utterance_nonce(config.key, id), config.payload,
                                    config.params, frames);
    }

    for (std::size_t ci = 0; ci < num_conditions; ++ci) {
      try {
        const LatentSequence trial[2] = {channel(marked, config.conditions[ci], config.codec, u),
                                         channel(f, config.conditions[ci], config.codec, u)};
        for (int w = 0; w < 2; ++w) {
          const ProjectedSequence zt = project(trial[w], basis);
          out.scores[ci][0][w] = detection_score(zt, schedule, basis.eigenvalues());
          if (wrong_key) out.scores[ci][1][w] = detection_score(zt, *wrong_key, basis.eigenvalues());
          if (wrong_nonce) out.scores[ci][2][w] = detection_score(zt, *wrong_nonce, basis.eigenvalues());
        }
      } catch (const std::exception& e) {
        out.errors[ci] = e.what();
      }
    }
  };

  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(num_utts)));
  if (threads == 1) {
    for (std::size_t u = 0; u < num_utts; ++u) process(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t u = next++; u < num_utts; u = next++) {
          try {
            process(u);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<Track> tracks{Track::kCorrect};
  if (config.wrong_key_track) tracks.push_back(Track::kWrongKey);
  if (config.wrong_nonce_track) tracks.push_back(Track::kWrongNonce);

  ExperimentResult result;
  for (std::size_t ci = 0; ci < num_conditions; ++ci) {
    const std::string condition = to_string(config.conditions[ci]);
    std::optional<std::string> error;
    for (std::size_t u = 0; u < num_utts && !error; ++u) {
      if (per_utt[u].errors[ci]) error = corpus.ids[u] + ": " + *per_utt[u].errors[ci];
    }
    for (Track track : tracks) {
      ConditionSummary summary;
      summary.condition = track_label(condition, track);
      if (error) {
        summary.error = error;
        result.summary.push_back(std::move(summary));
        continue;
      }
      std::vector<double> pos, neg;
      const auto ti = static_cast<std::size_t>(track);
      for (std::size_t u = 0; u < num_utts; ++u) {
        const auto& s = per_utt[u].scores[ci][ti];
        pos.push_back(s[0]);
        neg.push_back(s[1]);
        result.records.push_back({corpus.ids[u], summary.condition, true, track == Track::kCorrect, s[0]});
        result.records.push_back({corpus.ids[u], summary.condition, false, track == Track::kCorrect, s[1]});
      }
      summary.auc = auc_roc(pos, neg);
      summary.n_pos = static_cast<long>(pos.size());
      summary.n_neg = static_cast<long>(neg.size());
      result.summary.push_back(std::move(summary));
    }
  }
  return result;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string records_to_csv(std::span<const TrialRecord> records) {
  std::string out = "utt_id,condition,watermarked,key_match,score\r\n";
  char buf[64];
  for (const auto& r : records) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r.score);
    out += csv_escape(r.utterance_id);
    out += ',';
    out += csv_escape(r.condition);
    out += r.watermarked ? ",1" : ",0";
    out += r.key_match ? ",1," : ",0,";
    out.append(buf, ptr);
    out += "\r\n";
  }
  return out;
}

void write_records_csv(std::span<const TrialRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  out << records_to_csv(records);
  require(static_cast<bool>(out), ErrorKind::kIo, "short write to '" + path.string() + "'");
}

std::string summary_to_json(std::span<const ConditionSummary> summary) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& s : summary) {
    nlohmann::ordered_json entry;
    if (s.error) {
      entry["auc"] = nullptr;
      entry["n_pos"] = 0;
      entry["n_neg"] = 0;
      entry["error"] = *s.error;
    } else {
      entry["auc"] = s.auc;
      entry["n_pos"] = s.n_pos;
      entry["n_neg"] = s.n_neg;
    }
    j[s.condition] = std::move(entry);
  }
  return j.dump(2);
}

}  // namespace lss
