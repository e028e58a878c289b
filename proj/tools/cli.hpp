#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lss/codecs.hpp"
#include "lss/manipulations.hpp"
#include "lss/schedule.hpp"
#include "lss/synthetic.hpp"

namespace CLI {
class App;
}

namespace lss::cli {

// Exit status contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotDetected = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Bad flags, config values or inputs that are detected before any work starts.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every setting that a config file or flag can carry. Names match the
/// config keys; flags use the same names with '-' or '_'.
struct Options {
  std::string config_path;

  // Secrets and payload.
  std::string key;
  std::string wrong_key;
  std::string nonce;
  std::string nonce_manifest;
  std::string payload = "ffff";
  int payload_bits = 16;

  std::string basis;
  ScheduleParams params;

  // Codec and waveform handling.
  std::string codec = "dct_bank";
  int frame_len = 320;
  int hop = 0;  // 0: equal to frame_len
  int sample_rate = 24000;
  double duration = 10.0;  // seconds; 0 disables standardization

  // Detection.
  std::optional<double> threshold;
  double fpr = 0.01;
  bool calibrate = false;
  int calibration_schedules = 256;
  bool terms = false;

  // Synthetic corpus.
  long dim = 128;
  long frames = 750;
  long utterances = 100;
  std::string spectrum = "geometric:span=10";
  double variance_scale = 1.0;
  double frame_rate = 75.0;
  std::uint64_t basis_seed = 1;
  std::uint64_t seed = 2;
  std::uint64_t fit_seed = 1;

  // Evaluation.
  std::vector<std::string> conditions{"clean"};
  bool wrong_key_track = true;
  bool wrong_nonce_track = true;
  int threads = 0;  // 0: hardware concurrency
  std::vector<std::string> inputs;
  std::string out_csv;
  std::string out_json;
};

// Registers every config key as an option of `app`.
void register_options(CLI::App& app, Options& opts);

/// Options parsed into library types and checked against every module's
/// invariants before any work starts. Throws UsageError on the first
/// violation.
struct Resolved {
  std::optional<SecretKey> key;  // flag or config, then LSS_KEY
  std::optional<SecretKey> wrong_key;
  std::optional<Nonce> nonce;
  Payload payload{std::vector<bool>{true}};
  CodecSpec codec;
  SyntheticCorpusSpec synthetic;
  std::vector<ManipulationSpec> conditions;

  // Throws UsageError when no key was supplied.
  const SecretKey& require_key() const;
};

Resolved resolve(const Options& opts);

// Expands shell-style patterns, sorted and without duplicates.
std::vector<std::string> expand_globs(const std::vector<std::string>& patterns);

int cmd_fit_pca(const Options& opts, const std::vector<std::string>& inputs, const std::string& out);
int cmd_embed(const Options& opts, const std::string& input, const std::string& out);
int cmd_detect(const Options& opts, const std::string& input);
int cmd_attack(const Options& opts, const std::string& input, const std::string& spec, const std::string& out);
int cmd_evaluate(const Options& opts);
int cmd_gen_corpus(const Options& opts, const std::string& out_dir, const std::string& format);

}  // namespace lss::cli
