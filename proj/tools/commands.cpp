#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "lss/error.hpp"
#include "lss/evaluation.hpp"
#include "lss/formats.hpp"
#include "lss/resample.hpp"
#include "lss/wav.hpp"
#include "lss/watermark.hpp"

namespace lss::cli {

namespace {

namespace fs = std::filesystem;

bool is_latent_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".lssl";
}

PcaBasis load_basis(const Options& o) {
  if (o.basis.empty()) throw UsageError("no basis: pass --basis <file.lssb>");
  return read_basis(o.basis);
}

struct LoadedInput {
  LatentSequence latents;
  Bytes content;  // bytes the content-derived nonce is computed from
  bool from_wav = false;
};

Bytes float_bytes(const std::vector<double>& samples) {
  Bytes out(samples.size() * sizeof(float));
  for (std::size_t t = 0; t < samples.size(); ++t) {
    const float v = static_cast<float>(samples[t]);
    std::memcpy(out.data() + t * sizeof(float), &v, sizeof(float));
  }
  return out;
}

LoadedInput load_input(const fs::path& path, const Options& o, const Resolved& r, bool standardize) {
  if (is_latent_file(path)) {
    LatentSequence f = read_latents(path);
    Bytes content = serialize_latents(f);
    return {std::move(f), std::move(content), false};
  }
  if (r.codec.kind == CodecKind::kExternalLatents) {
    throw UsageError("codec external_latents accepts only .lssl inputs, got " + path.string());
  }
  Waveform x = read_wav(path);
  if (x.sample_rate_hz != o.sample_rate) x = resample(x, o.sample_rate);
  if (standardize && o.duration > 0.0) x = standardize_duration(x, o.duration);
  Bytes content = float_bytes(x.samples);
  return {encode(x, r.codec), std::move(content), true};
}

void write_output(const LatentSequence& f, const fs::path& out, const CodecSpec& codec) {
  if (is_latent_file(out)) {
    write_latents(f, out);
  } else {
    write_wav(decode(f, codec), out);
  }
}

std::optional<Nonce> manifest_lookup(const fs::path& manifest, const std::string& name) {
  std::ifstream in(manifest);
  if (!in) return std::nullopt;
  std::optional<Nonce> found;
  std::string item, hex;
  while (in >> item >> hex) {
    if (item == name) found = Nonce::from_hex(hex);
  }
  return found;
}

void manifest_append(const fs::path& manifest, const std::string& name, const Nonce& nonce) {
  std::ofstream out(manifest, std::ios::app);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot append to " + manifest.string());
  out << name << ' ' << nonce.hex() << '\n';
}

SecretKey derived_wrong_key(const SecretKey& key) {
  const std::string tag = "lss-wrong-key-v1";
  const Digest d = hmac_sha256(key.bytes(), Bytes(tag.begin(), tag.end()));
  return SecretKey(d);
}

int worker_threads(const Options& o) {
  if (o.threads > 0) return o.threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace

int cmd_fit_pca(const Options& o, const std::vector<std::string>& patterns, const std::string& out) {
  const Resolved r = resolve(o);
  const auto paths = expand_globs(patterns);
  if (paths.empty()) throw UsageError("no input files match the given patterns");
  PcaAccumulator acc;
  for (const auto& path : paths) acc.add(load_input(path, o, r, false).latents);
  const PcaBasis basis = acc.finish();
  write_basis(basis, out);
  std::printf("fitted %ld-dimensional basis from %lld frames in %zu files\nbasis id %s\n",
              static_cast<long>(basis.dim()), acc.frames(), paths.size(), basis.id().c_str());
  return kExitOk;
}

int cmd_embed(const Options& o, const std::string& input, const std::string& out) {
  const Resolved r = resolve(o);
  const SecretKey& key = r.require_key();
  const PcaBasis basis = load_basis(o);
  const LoadedInput in = load_input(input, o, r, true);

  Nonce nonce = r.nonce ? *r.nonce : derive_nonce(key, in.content);
  if (!r.nonce) std::fprintf(stderr, "nonce %s (derived from content)\n", nonce.hex().c_str());

  const ProjectedSequence z = project(in.latents, basis);
  const WatermarkSchedule schedule = derive_schedule(key, nonce, r.payload, o.params, z.frames());
  const std::size_t capacity =
      static_cast<std::size_t>(schedule.chunks()) * static_cast<std::size_t>(schedule.planes_per_chunk());
  if (r.payload.size() > capacity) {
    std::fprintf(stderr, "warning: payload of %zu bits exceeds the %zu plane slots; only the first %zu bits are embedded\n",
                 r.payload.size(), capacity, capacity);
  }
  const LatentSequence marked = unproject(embed(z, schedule), basis);
  write_output(LatentSequence(marked.data(), in.latents.frame_rate_hz(), in.latents.trailing_samples()), out,
               r.codec);
  if (!o.nonce_manifest.empty()) manifest_append(o.nonce_manifest, fs::path(out).filename().string(), nonce);

  const long marked_frames = static_cast<long>(schedule.chunks()) * o.params.chunk_frames;
  std::printf("watermarked %ld of %ld frames in %d chunks (%d planes per chunk)\n", marked_frames,
              static_cast<long>(z.frames()), schedule.chunks(), schedule.planes_per_chunk());
  return kExitOk;
}

int cmd_detect(const Options& o, const std::string& input) {
  const Resolved r = resolve(o);
  const SecretKey& key = r.require_key();
  std::optional<Nonce> nonce = r.nonce;
  if (!nonce && !o.nonce_manifest.empty()) {
    nonce = manifest_lookup(o.nonce_manifest, fs::path(input).filename().string());
  }
  if (!nonce) throw UsageError("no nonce for " + input + ": pass --nonce or a --nonce-manifest that lists it");
  const PcaBasis basis = load_basis(o);
  const LoadedInput in = load_input(input, o, r, true);
  const ProjectedSequence z = project(in.latents, basis);
  const WatermarkSchedule schedule = derive_schedule(key, *nonce, r.payload, o.params, z.frames());

  double threshold = 0.0;
  std::string source;
  if (o.threshold) {
    threshold = *o.threshold;
    source = "given";
  } else if (o.calibrate) {
    std::vector<double> null_scores;
    for (int k = 0; k < o.calibration_schedules; ++k) {
      const std::string label = "lss-calibration:" + std::to_string(k) + ":" + nonce->hex();
      const Nonce other = derive_nonce(key, Bytes(label.begin(), label.end()));
      const auto s = derive_schedule(key, other, r.payload, o.params, z.frames());
      null_scores.push_back(detection_score(z, s, basis.eigenvalues()));
    }
    threshold = calibrate_threshold(null_scores, o.fpr);
    source = "calibrated";
  } else {
    threshold = default_threshold(schedule, o.fpr);
    source = "closed_form";
  }

  const DetectionReport report = detect(z, schedule, basis.eigenvalues(), threshold);
  auto j = nlohmann::ordered_json::parse(to_json(report, o.terms));
  j["threshold_source"] = source;
  j["fpr"] = o.fpr;
  j["nonce"] = nonce->hex();
  std::printf("%s\n", j.dump(2).c_str());
  return report.decision ? kExitOk : kExitNotDetected;
}

int cmd_attack(const Options& o, const std::string& input, const std::string& spec_text, const std::string& out) {
  resolve(o);
  ManipulationSpec spec;
  try {
    spec = parse_manipulation(spec_text);
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (is_latent_file(input)) throw UsageError("attack needs a WAV input, got " + input);
  const Waveform x = read_wav(input);
  const Waveform y = apply_manipulation(x, spec);
  write_wav(y, out);
  std::printf("applied %s: %zu samples at %d Hz -> %zu samples at %d Hz\n", to_string(spec).c_str(), x.samples.size(),
              x.sample_rate_hz, y.samples.size(), y.sample_rate_hz);
  return kExitOk;
}

int cmd_evaluate(const Options& o) {
  const Resolved r = resolve(o);
  const SecretKey& key = r.require_key();

  LabeledCorpus corpus;
  std::optional<PcaBasis> basis;
  if (!o.basis.empty()) basis = read_basis(o.basis);

  if (!o.inputs.empty()) {
    const auto paths = expand_globs(o.inputs);
    if (paths.empty()) throw UsageError("no input files match the given patterns");
    for (const auto& path : paths) {
      corpus.ids.push_back(fs::path(path).stem().string());
      corpus.sequences.push_back(load_input(path, o, r, true).latents);
    }
    if (!basis) basis = fit_pca(corpus.sequences);
  } else {
    if (r.codec.kind != CodecKind::kExternalLatents && r.codec.frame_len != o.dim) {
      throw UsageError("a synthetic corpus of dimension " + std::to_string(o.dim) +
                       " needs frame_len = dim for a waveform codec");
    }
    const SyntheticCorpus source(r.synthetic);
    for (long u = 0; u < source.size(); ++u) {
      corpus.ids.push_back(source.utterance_id(u));
      corpus.sequences.push_back(source.utterance(u));
    }
    if (!basis) {
      SyntheticCorpusSpec fit = r.synthetic;
      fit.seed = o.fit_seed;
      basis = fit_pca(generate_synthetic_corpus(fit));
    }
  }

  ExperimentConfig config{key, r.wrong_key ? *r.wrong_key : derived_wrong_key(key), r.payload, o.params, r.codec,
                          r.conditions};
  config.wrong_key_track = o.wrong_key_track;
  config.wrong_nonce_track = o.wrong_nonce_track;
  config.threads = worker_threads(o);
  const ExperimentResult result = run_experiment(corpus, *basis, config);

  if (!o.out_csv.empty()) write_records_csv(result.records, o.out_csv);
  const std::string summary = summary_to_json(result.summary);
  if (!o.out_json.empty()) {
    const std::string text = summary + "\n";
    write_file(o.out_json, Bytes(text.begin(), text.end()));
  }
  std::printf("%s\n", summary.c_str());
  for (const auto& s : result.summary) {
    if (s.error) std::fprintf(stderr, "condition %s failed: %s\n", s.condition.c_str(), s.error->c_str());
  }
  return result.all_completed() ? kExitOk : kExitRuntime;
}

int cmd_gen_corpus(const Options& o, const std::string& out_dir, const std::string& format) {
  const Resolved r = resolve(o);
  if (format != "lssl" && format != "wav") throw UsageError("format must be lssl or wav, got " + format);
  CodecSpec codec = r.codec;
  if (format == "wav") {
    if (codec.kind == CodecKind::kExternalLatents) throw UsageError("wav output needs a waveform codec");
    codec.frame_len = codec.hop = static_cast<int>(o.dim);
  }
  fs::create_directories(out_dir);
  const SyntheticCorpus source(r.synthetic);
  long clipped = 0;
  int rate = 0;
  for (long u = 0; u < source.size(); ++u) {
    const LatentSequence f = source.utterance(u);
    const fs::path path = fs::path(out_dir) / (source.utterance_id(u) + "." + format);
    if (format == "lssl") {
      write_latents(f, path);
      continue;
    }
    const Waveform x = decode(f, codec);
    rate = x.sample_rate_hz;
    clipped += std::count_if(x.samples.begin(), x.samples.end(), [](double v) { return std::abs(v) > 1.0; });
    write_wav(x, path);
  }
  if (clipped > 0) {
    std::fprintf(stderr, "warning: %ld samples clipped to [-1, 1]; lower --variance-scale\n", clipped);
  }
  if (format == "wav") {
    std::printf("wrote %ld WAV files at %d Hz (frame_len %ld) to %s\n", source.size(), rate, o.dim, out_dir.c_str());
  } else {
    std::printf("wrote %ld LSSL files (n=%ld, T=%ld) to %s\n", source.size(), o.dim, o.frames, out_dir.c_str());
  }
  return kExitOk;
}

}  // namespace lss::cli
