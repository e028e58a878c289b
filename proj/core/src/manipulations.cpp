#include "lss/manipulations.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>

#include <fftw3.h>

#include "lss/error.hpp"
#include "lss/resample.hpp"
#include "lss/wav.hpp"

namespace lss {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

double parse_number(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  require(ec == std::errc() && ptr == end && std::isfinite(out), ErrorKind::kFormat,
          "manipulation parameter " + key + "='" + value + "' is not a number");
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  require(ec == std::errc() && ptr == end, ErrorKind::kFormat,
          "manipulation parameter " + key + "='" + value + "' is not a non-negative integer");
  return out;
}

std::map<std::string, std::string> parse_params(std::string_view text) {
  std::map<std::string, std::string> params;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eq = text.find('=', pos);
    require(eq != std::string_view::npos, ErrorKind::kFormat,
            "expected key=value in manipulation parameters '" + std::string(text) + "'");
    std::string key(text.substr(pos, eq - pos));
    require(!key.empty(), ErrorKind::kFormat, "empty manipulation parameter name");
    pos = eq + 1;
    std::string value;
    if (pos < text.size() && text[pos] == '"') {
      ++pos;
      bool closed = false;
      while (pos < text.size()) {
        const char c = text[pos++];
        if (c == '\\' && pos < text.size()) {
          value.push_back(text[pos++]);
        } else if (c == '"') {
          closed = true;
          break;
        } else {
          value.push_back(c);
        }
      }
      require(closed, ErrorKind::kFormat, "unterminated quote in manipulation parameter " + key);
      require(pos == text.size() || text[pos] == ',', ErrorKind::kFormat,
              "unexpected text after quoted value of " + key);
    } else {
      const std::size_t comma = text.find(',', pos);
      value = std::string(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      pos = comma == std::string_view::npos ? text.size() : comma;
    }
    if (pos < text.size()) ++pos;  // skip ','
    require(params.emplace(std::move(key), std::move(value)).second, ErrorKind::kFormat,
            "duplicate manipulation parameter in '" + std::string(text) + "'");
  }
  return params;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string quote(const std::string& value) {
  if (value.find_first_of(",\" \\=") == std::string::npos && !value.empty()) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string replace_all(std::string text, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

}  // namespace

void ManipulationSpec::validate() const {
  switch (kind) {
    case ManipulationKind::kClean: break;
    case ManipulationKind::kLowpass:
    case ManipulationKind::kHighpass:
      require(cutoff_hz > 0.0, ErrorKind::kInvalidArgument, "filter cutoff must be positive");
      break;
    case ManipulationKind::kBandpass:
      require(low_hz > 0.0 && high_hz > low_hz, ErrorKind::kInvalidArgument, "bandpass needs 0 < lo < hi");
      break;
    case ManipulationKind::kWhiteNoise:
    case ManipulationKind::kPinkNoise:
      require(std::isfinite(snr_db), ErrorKind::kInvalidArgument, "SNR must be finite");
      break;
    case ManipulationKind::kResample:
      require(target_rate_hz > 0, ErrorKind::kInvalidArgument, "resample rate must be positive");
      break;
    case ManipulationKind::kExternalCommand:
      require(!command.empty(), ErrorKind::kInvalidArgument, "external command template is empty");
      break;
  }
}

ManipulationSpec parse_manipulation(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  auto params = parse_params(colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1));

  auto take = [&](const char* key) -> std::string {
    auto it = params.find(key);
    require(it != params.end(), ErrorKind::kFormat,
            "manipulation '" + std::string(text) + "' is missing parameter " + key);
    std::string v = std::move(it->second);
    params.erase(it);
    return v;
  };
  auto take_or = [&](const char* key, std::string fallback) -> std::string {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    std::string v = std::move(it->second);
    params.erase(it);
    return v;
  };

  ManipulationSpec spec;
  if (kind == "clean" || kind == "none") {
    spec.kind = ManipulationKind::kClean;
  } else if (kind == "lowpass" || kind == "highpass") {
    spec.kind = kind == "lowpass" ? ManipulationKind::kLowpass : ManipulationKind::kHighpass;
    spec.cutoff_hz = parse_number("fc", take("fc"));
  } else if (kind == "bandpass") {
    spec.kind = ManipulationKind::kBandpass;
    spec.low_hz = parse_number("lo", take("lo"));
    spec.high_hz = parse_number("hi", take("hi"));
  } else if (kind == "white" || kind == "white_noise" || kind == "pink" || kind == "pink_noise") {
    spec.kind = kind.starts_with("white") ? ManipulationKind::kWhiteNoise : ManipulationKind::kPinkNoise;
    spec.snr_db = parse_number("snr", take("snr"));
    spec.seed = parse_unsigned("seed", take_or("seed", "0"));
  } else if (kind == "resample") {
    spec.kind = ManipulationKind::kResample;
    const auto rate = parse_unsigned("rate", take("rate"));
    require(rate > 0 && rate < (1u << 30), ErrorKind::kFormat, "resample rate out of range");
    spec.target_rate_hz = static_cast<int>(rate);
  } else if (kind == "ext" || kind == "external_command") {
    spec.kind = ManipulationKind::kExternalCommand;
    spec.command = take("cmd");
  } else {
    fail(ErrorKind::kFormat, "unknown manipulation kind '" + kind + "'");
  }
  require(params.empty(), ErrorKind::kFormat,
          "unknown parameter '" + (params.empty() ? std::string() : params.begin()->first) + "' for " + kind);
  spec.validate();
  return spec;
}

std::string to_string(const ManipulationSpec& spec) {
  switch (spec.kind) {
    case ManipulationKind::kClean: return "clean";
    case ManipulationKind::kLowpass: return "lowpass:fc=" + format_number(spec.cutoff_hz);
    case ManipulationKind::kHighpass: return "highpass:fc=" + format_number(spec.cutoff_hz);
    case ManipulationKind::kBandpass:
      return "bandpass:lo=" + format_number(spec.low_hz) + ",hi=" + format_number(spec.high_hz);
    case ManipulationKind::kWhiteNoise:
      return "white:snr=" + format_number(spec.snr_db) + ",seed=" + std::to_string(spec.seed);
    case ManipulationKind::kPinkNoise:
      return "pink:snr=" + format_number(spec.snr_db) + ",seed=" + std::to_string(spec.seed);
    case ManipulationKind::kResample: return "resample:rate=" + std::to_string(spec.target_rate_hz);
    case ManipulationKind::kExternalCommand: return "ext:cmd=" + quote(spec.command);
  }
  return "clean";
}

Waveform butterworth(const Waveform& x, FilterBand band, double cutoff_hz, double high_hz) {
  validate(x);
  const SosFilter filter = design_butterworth(band, kAttackFilterOrder, x.sample_rate_hz, cutoff_hz, high_hz);
  return Waveform{filter.apply(x.samples), x.sample_rate_hz};
}

double mean_power(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return acc / static_cast<double>(samples.size());
}

std::vector<double> make_noise(std::size_t count, NoiseColor color, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(count);
  for (double& v : noise) v = gauss(rng);
  if (color == NoiseColor::kWhite || count < 2) return noise;

  // Shape the spectrum: amplitude 1/sqrt(k) per bin gives power 1/f.
  const std::size_t bins = count / 2 + 1;
  fftw_complex* spectrum = fftw_alloc_complex(bins);
  fftw_plan forward, backward;
  {
    std::lock_guard lock(fftw_planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(count), noise.data(), spectrum, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(count), spectrum, noise.data(), FFTW_ESTIMATE);
  }
  fftw_execute(forward);
  spectrum[0][0] = spectrum[0][1] = 0.0;
  for (std::size_t k = 1; k < bins; ++k) {
    const double gain = 1.0 / std::sqrt(static_cast<double>(k));
    spectrum[k][0] *= gain;
    spectrum[k][1] *= gain;
  }
  fftw_execute(backward);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  fftw_free(spectrum);
  return noise;
}

Waveform add_noise(const Waveform& x, NoiseColor color, double snr_db, std::uint64_t seed) {
  validate(x);
  require(std::isfinite(snr_db), ErrorKind::kInvalidArgument, "SNR must be finite");
  const double signal_power = mean_power(x.samples);
  require(signal_power > 0.0, ErrorKind::kInvalidArgument, "cannot set an SNR on a silent signal");

  std::vector<double> noise = make_noise(x.samples.size(), color, seed);
  const double noise_power = mean_power(noise);
  require(noise_power > 0.0, ErrorKind::kNumerical, "generated noise has zero power");
  const double scale = std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0) / noise_power);

  Waveform out = x;
  for (std::size_t t = 0; t < out.samples.size(); ++t) out.samples[t] += scale * noise[t];
  return out;
}

Waveform external_command(const Waveform& x, std::string_view command_template) {
  validate(x);
  require(!command_template.empty(), ErrorKind::kInvalidArgument, "external command template is empty");
  static std::atomic<unsigned long> counter{0};
  namespace fs = std::filesystem;
  const std::string stem = "lss-ext-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  const fs::path dir = fs::temp_directory_path() / stem;
  fs::create_directories(dir);
  const fs::path in = dir / "in.wav";
  const fs::path out = dir / "out.wav";

  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{dir};

  write_wav(x, in);
  std::string command = replace_all(std::string(command_template), "{in}", in.string());
  command = replace_all(std::move(command), "{out}", out.string());
  const int status = std::system(command.c_str());
  require(status != -1 && WIFEXITED(status), ErrorKind::kExternalTool, "could not run '" + command + "'");
  const int code = WEXITSTATUS(status);
  require(code == 0, ErrorKind::kExternalTool,
          "'" + command + "' exited with status " + std::to_string(code) + (code == 127 ? " (command not found)" : ""));
  require(fs::exists(out), ErrorKind::kExternalTool, "'" + command + "' did not produce " + out.string());

  Waveform result;
  try {
    result = read_wav(out);
  } catch (const Error& e) {
    fail(ErrorKind::kExternalTool, "unreadable output from '" + command + "': " + e.what());
  }
  return resample(result, x.sample_rate_hz);
}

Waveform apply_manipulation(const Waveform& x, const ManipulationSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ManipulationKind::kClean: return x;
    case ManipulationKind::kLowpass: return butterworth(x, FilterBand::kLowpass, spec.cutoff_hz);
    case ManipulationKind::kHighpass: return butterworth(x, FilterBand::kHighpass, spec.cutoff_hz);
    case ManipulationKind::kBandpass: return butterworth(x, FilterBand::kBandpass, spec.low_hz, spec.high_hz);
    case ManipulationKind::kWhiteNoise: return add_noise(x, NoiseColor::kWhite, spec.snr_db, spec.seed);
    case ManipulationKind::kPinkNoise: return add_noise(x, NoiseColor::kPink, spec.snr_db, spec.seed);
    case ManipulationKind::kResample: return resample(x, spec.target_rate_hz);
    case ManipulationKind::kExternalCommand: return external_command(x, spec.command);
  }
  return x;
}

}  // namespace lss
