#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "CLI11.hpp"
#include "cli.hpp"
#include "lss/error.hpp"

namespace lss::cli {

namespace {

// "--chunk-frames,--chunk_frames": the underscore form is the config key.
std::string names(const std::string& key) {
  std::string dashed = key;
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  return dashed == key ? "--" + key : "--" + dashed + ",--" + key;
}

template <typename T>
CLI::Option* add(CLI::App& app, const std::string& key, T& value, const std::string& help) {
  return app.add_option(names(key), value, help)->capture_default_str();
}

CLI::Option* flag(CLI::App& app, const std::string& key, bool& value, const std::string& help) {
  return app.add_flag(names(key), value, help)->capture_default_str();
}

}  // namespace

void register_options(CLI::App& app, Options& o) {
  app.set_config("--config", "", "key = value file; flags given on the command line override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  const char* secrets = "Secrets and payload";
  add(app, "key", o.key, "secret key, 64 hex digits (falls back to $LSS_KEY)")->group(secrets);
  add(app, "wrong_key", o.wrong_key, "key for the wrong-key track (default: derived from key)")->group(secrets);
  add(app, "nonce", o.nonce, "per-utterance nonce, 32 hex digits (embed default: derived from content)")
      ->group(secrets);
  add(app, "nonce_manifest", o.nonce_manifest, "file of '<name> <nonce>' lines; embed appends, detect looks up")
      ->group(secrets);
  add(app, "payload", o.payload, "payload bits as hex, most significant bit first")->group(secrets);
  add(app, "payload_bits", o.payload_bits, "payload length in bits (<= 4 * hex digits)")->group(secrets);

  const char* schedule = "Schedule";
  add(app, "basis", o.basis, "PCA basis file (LSSB)")->group(schedule);
  add(app, "chunk_frames", o.params.chunk_frames, "frames per chunk M")->group(schedule);
  add(app, "subchunk_frames", o.params.subchunk_frames, "frames per subchunk")->group(schedule);
  add(app, "planes_per_chunk", o.params.planes_per_chunk, "disjoint planes rotated per chunk P")->group(schedule);
  add(app, "theta", o.params.theta, "rotation angle in radians")->group(schedule);
  add(app, "candidate_components", o.params.candidate_components, "planes use only the leading components")
      ->group(schedule);

  const char* codec = "Codec";
  add(app, "codec", o.codec, "frame_stack | dct_bank | external_latents")->group(codec);
  add(app, "frame_len", o.frame_len, "samples per latent frame")->group(codec);
  add(app, "hop", o.hop, "hop in samples (0: frame_len)")->group(codec);
  add(app, "sample_rate", o.sample_rate, "codec sample rate; WAV inputs are resampled to it")->group(codec);
  add(app, "duration", o.duration, "embed input length in seconds, looped or cut (0: keep)")->group(codec);

  const char* detection = "Detection";
  add(app, "threshold", o.threshold, "decision threshold (default: closed form at --fpr)")->group(detection);
  add(app, "fpr", o.fpr, "target false positive rate")->group(detection);
  flag(app, "calibrate", o.calibrate, "calibrate the threshold on non-matching schedules")->group(detection);
  add(app, "calibration_schedules", o.calibration_schedules, "schedules used by --calibrate")->group(detection);
  flag(app, "terms", o.terms, "include every detection term in the report")->group(detection);

  const char* corpus = "Synthetic corpus";
  add(app, "dim", o.dim, "latent dimension n")->group(corpus);
  add(app, "frames", o.frames, "frames per utterance T")->group(corpus);
  add(app, "utterances", o.utterances, "number of utterances")->group(corpus);
  add(app, "spectrum", o.spectrum, "geometric:ratio=r | geometric:span=s | linear:hi=a,lo=b | explicit:v1,v2,...")
      ->group(corpus);
  add(app, "variance_scale", o.variance_scale, "multiplies the whole spectrum")->group(corpus);
  add(app, "frame_rate", o.frame_rate, "latent frame rate in Hz")->group(corpus);
  add(app, "basis_seed", o.basis_seed, "seed of the mixing basis and mean")->group(corpus);
  add(app, "seed", o.seed, "seed of the frame draws")->group(corpus);
  add(app, "fit_seed", o.fit_seed, "frame seed of the corpus evaluate fits its basis on")->group(corpus);

  const char* evaluation = "Evaluation";
  add(app, "conditions", o.conditions, "manipulation specs, one per condition")->group(evaluation);
  flag(app, "wrong_key_track", o.wrong_key_track, "also score with a wrong key (=false to skip)")
      ->group(evaluation);
  flag(app, "wrong_nonce_track", o.wrong_nonce_track, "also score with a wrong nonce (=false to skip)")
      ->group(evaluation);
  add(app, "threads", o.threads, "worker threads (0: all cores)")->group(evaluation);
  add(app, "inputs", o.inputs, "WAV or LSSL files (glob patterns) instead of a synthetic corpus")->group(evaluation);
  add(app, "out_csv", o.out_csv, "write per-trial records as CSV")->group(evaluation);
  add(app, "out_json", o.out_json, "write the per-condition summary as JSON")->group(evaluation);
}

const SecretKey& Resolved::require_key() const {
  if (!key) throw UsageError("no secret key: pass --key, set key in the config file, or export LSS_KEY");
  return *key;
}

Resolved resolve(const Options& o) {
  Resolved r;
  try {
    std::string key_hex = o.key;
    if (key_hex.empty()) {
      if (const char* env = std::getenv("LSS_KEY")) key_hex = env;
    }
    if (!key_hex.empty()) r.key = SecretKey::from_hex(key_hex);
    if (!o.wrong_key.empty()) r.wrong_key = SecretKey::from_hex(o.wrong_key);
    if (!o.nonce.empty()) r.nonce = Nonce::from_hex(o.nonce);

    require(o.payload_bits >= 1, ErrorKind::kInvalidArgument, "payload_bits must be at least 1");
    r.payload = Payload::from_hex(o.payload, static_cast<std::size_t>(o.payload_bits));

    o.params.validate();
    r.codec.kind = parse_codec_kind(o.codec);
    r.codec.frame_len = o.frame_len;
    r.codec.hop = o.hop == 0 ? o.frame_len : o.hop;
    r.codec.validate();
    require(o.sample_rate > 0, ErrorKind::kInvalidArgument, "sample_rate must be positive");
    require(o.duration >= 0.0 && std::isfinite(o.duration), ErrorKind::kInvalidArgument,
            "duration must be non-negative");

    if (o.threshold) require(std::isfinite(*o.threshold), ErrorKind::kInvalidArgument, "threshold must be finite");
    require(o.fpr > 0.0 && o.fpr < 1.0, ErrorKind::kInvalidArgument, "fpr must lie in (0, 1)");
    require(o.calibration_schedules >= 100, ErrorKind::kInvalidArgument, "calibration_schedules must be at least 100");
    require(o.threads >= 0, ErrorKind::kInvalidArgument, "threads must be non-negative");

    r.synthetic.n = o.dim;
    r.synthetic.frames = o.frames;
    r.synthetic.num_utterances = o.utterances;
    r.synthetic.spectrum = EigenSpectrum::parse(o.spectrum);
    r.synthetic.variance_scale = o.variance_scale;
    r.synthetic.frame_rate_hz = o.frame_rate;
    r.synthetic.basis_seed = o.basis_seed;
    r.synthetic.seed = o.seed;
    r.synthetic.validate();
    r.synthetic.spectrum.materialize(o.dim);

    require(!o.conditions.empty(), ErrorKind::kInvalidArgument, "at least one condition is needed");
    for (const auto& text : o.conditions) {
      ManipulationSpec spec = parse_manipulation(text);
      spec.validate();
      r.conditions.push_back(std::move(spec));
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return r;
}

std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const auto& pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == 0) {
      for (std::size_t k = 0; k < g.gl_pathc; ++k) out.emplace_back(g.gl_pathv[k]);
    }
    ::globfree(&g);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace lss::cli
