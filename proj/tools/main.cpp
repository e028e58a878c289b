#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "lss/error.hpp"

int main(int argc, char** argv) {
  using namespace lss::cli;
  CLI::App app{"Latent secret spin watermarking: fit a PCA basis, embed, detect, attack, evaluate"};
  app.set_version_flag("--version", "lss 0.1.0");
  app.require_subcommand(1);
  app.fallthrough();

  Options opts;
  register_options(app, opts);

  std::vector<std::string> fit_inputs;
  std::string input, out, spec, out_dir, format = "lssl";

  auto* fit = app.add_subcommand("fit-pca", "Fit a PCA basis over WAV or LSSL inputs");
  fit->add_option("inputs", fit_inputs, "input files or glob patterns")->required();
  fit->add_option("-o,--out", out, "output basis (LSSB)")->required();

  auto* emb = app.add_subcommand("embed", "Watermark one utterance");
  emb->add_option("input", input, "WAV or LSSL input")->required();
  emb->add_option("-o,--out", out, "output WAV or LSSL")->required();

  auto* det = app.add_subcommand("detect", "Score one utterance; exit 0 if detected, 1 if not");
  det->add_option("input", input, "WAV or LSSL input")->required();

  auto* atk = app.add_subcommand("attack", "Apply one manipulation to a WAV file");
  atk->add_option("input", input, "WAV input")->required();
  atk->add_option("spec", spec, "manipulation spec, e.g. lowpass:fc=1000")->required();
  atk->add_option("-o,--out", out, "output WAV")->required();

  auto* ev = app.add_subcommand("evaluate", "Run an AUC experiment and print the per-condition summary");

  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic corpus");
  gen->add_option("-o,--out-dir", out_dir, "output directory")->required();
  gen->add_option("--format", format, "lssl or wav")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit) return cmd_fit_pca(opts, fit_inputs, out);
    if (*emb) return cmd_embed(opts, input, out);
    if (*det) return cmd_detect(opts, input);
    if (*atk) return cmd_attack(opts, input, spec, out);
    if (*ev) return cmd_evaluate(opts);
    if (*gen) return cmd_gen_corpus(opts, out_dir, format);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "lss: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lss: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
