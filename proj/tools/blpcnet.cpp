// blpcnet: command-line front end for synthesis, benchmarking, weight
// generation and codec verification.
//
// Exit codes:
//   0  success
//   1  check failed (verify-codec found collapsed codes)
//   2  file missing or unreadable/unwritable
//   3  malformed file (bad magic, version, checksum, missing/mis-shaped tensor)
//   4  invalid configuration
//   5  invalid input or numeric failure
//   64 command-line usage error

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "blpc/audio_io.hpp"
#include "blpc/bench.hpp"
#include "blpc/codec.hpp"
#include "blpc/error.hpp"
#include "blpc/model.hpp"
#include "blpc/synth.hpp"
#include "blpc/weights.hpp"

namespace fs = std::filesystem;
using namespace blpc;

namespace
{

enum Exit : int
{
  ok = 0,
  check_failed = 1,
  io_error = 2,
  format_error = 3,
  config_error = 4,
  input_error = 5,
  usage_error = 64,
};

int exit_code(Errc code)
{
  switch (code)
  {
  case Errc::io:
    return io_error;
  case Errc::bad_magic:
  case Errc::version_mismatch:
  case Errc::checksum:
  case Errc::missing_tensor:
  case Errc::shape_mismatch:
  case Errc::format:
    return format_error;
  case Errc::config_invalid:
    return config_error;
  case Errc::invalid_input:
  case Errc::degenerate_input:
  case Errc::numeric:
    return input_error;
  }
  return input_error;
}

struct SynthArgs
{
  fs::path features;
  fs::path weights;
  fs::path out;
  std::uint64_t seed = 1;
  float temperature = 1.0f;
};

int cmd_synth(const SynthArgs& a)
{
  const Model model = Model::build(load_weights(a.weights));
  const auto frames = read_features(a.features);
  Synthesizer synth(model);
  synth.reserve(frames.size());
  std::vector<std::int16_t> pcm(frames.size() * static_cast<std::size_t>(model.config.frame_size));

  const auto start = std::chrono::steady_clock::now();
  const SynthStats stats = synth.run_into(frames, a.seed, a.temperature, pcm);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_wav(pcm, a.out, model.config.sample_rate);
  const double audio = static_cast<double>(pcm.size()) / model.config.sample_rate;
  std::printf("config=%s frames=%zu samples=%zu steps=%llu wall=%.4fs rtf=%.4f\n", model.config.name().c_str(),
              stats.frames, stats.samples, static_cast<unsigned long long>(stats.network_steps), wall,
              audio > 0.0 ? wall / audio : 0.0);
  return ok;
}

struct BenchArgs
{
  fs::path weights_dir;
  fs::path report = "bench_report.json";
  fs::path features;
  bool generate_missing = false;
  bool no_pin = false;
  bool quiet = false;
  std::vector<std::string> configs;
  BenchOptions options;
};

int cmd_bench(BenchArgs& a)
{
  BenchOptions& o = a.options;
  o.weights_dir = a.weights_dir;
  o.generate_missing = a.generate_missing;
  o.pin = !a.no_pin;
  if (!a.features.empty())
    o.features = read_features(a.features);
  if (!a.configs.empty())
  {
    o.configs.clear();
    for (const auto& name : a.configs)
      o.configs.push_back(ModelConfig::from_name(name));
  }
  const BenchReport report = run_bench(o, a.quiet ? nullptr : &std::cerr);
  const std::string json = report_json(report);
  const std::vector<std::uint8_t> bytes(json.begin(), json.end());
  write_file(a.report, bytes);
  std::cout << report_table(report);
  std::cout << "report written to " << a.report.string() << "\n";
  return ok;
}

struct GenWeightsArgs
{
  std::vector<std::string> configs;
  bool all = false;
  std::uint64_t seed = 1;
  fs::path out = ".";
};

int cmd_gen_weights(const GenWeightsArgs& a)
{
  std::vector<ModelConfig> configs;
  if (a.all)
    configs = evaluated_configs();
  for (const auto& name : a.configs)
    configs.push_back(ModelConfig::from_name(name));
  if (configs.empty())
    throw Error(Errc::invalid_input, "name at least one --config or pass --all");
  // A single config may be written to an explicit file name.
  const bool to_file = configs.size() == 1 && a.out.has_extension();
  const fs::path dir = to_file ? a.out.parent_path() : a.out;
  if (!dir.empty())
    fs::create_directories(dir);
  for (const auto& cfg : configs)
  {
    const fs::path path = to_file ? a.out : a.out / (cfg.name() + ".blpc");
    save_weights(generate_test_weights(a.seed, cfg), path);
    std::printf("wrote %s\n", path.string().c_str());
  }
  return ok;
}

struct GenFeaturesArgs
{
  std::size_t frames = 100;
  std::uint64_t seed = 1;
  fs::path out;
};

int cmd_gen_features(const GenFeaturesArgs& a)
{
  write_features(demo_features(a.frames, a.seed), a.out);
  std::printf("wrote %zu frames to %s\n", a.frames, a.out.string().c_str());
  return ok;
}

struct VerifyCodecArgs
{
  int bits = 11;
  double slope = 0.08;
  std::size_t show = 20;
};

int cmd_verify_codec(const VerifyCodecArgs& a)
{
  const MuLawSpec spec(a.bits, a.slope);
  const CodecAudit audit = audit_codec(spec);
  std::printf("mu-law B=%d w_s=%g: %d codes checked\n", a.bits, a.slope, audit.codes_checked);
  std::printf("encode(0)=%d encode(1)=%d step at zero=%d\n", encode(0, spec), encode(1, spec), audit.step_at_zero);
  std::printf("smallest PCM step between adjacent codes=%d\n", audit.min_pcm_step);
  std::printf("collapsed codes (encode(decode(y)) != y): %zu\n", audit.collapsed_codes.size());
  if (!audit.collapsed_codes.empty())
  {
    std::printf(" ");
    for (std::size_t i = 0; i < audit.collapsed_codes.size() && i < a.show; ++i)
      std::printf(" %d", audit.collapsed_codes[i]);
    if (audit.collapsed_codes.size() > a.show)
      std::printf(" ...");
    std::printf("\n");
  }
  std::printf("%s\n", audit.passed() ? "PASS" : "FAIL");
  return audit.passed() ? ok : check_failed;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Bunched LPCNet vocoder: synthesis, benchmarks and tooling"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Synthesize a WAV file from a feature file");
  s->add_option("--features", synth.features, "Feature file (BLPF)")->required();
  s->add_option("--weights", synth.weights, "Weight file (BLPC)")->required();
  s->add_option("--out", synth.out, "Output WAV path")->required();
  s->add_option("--seed", synth.seed, "Sampling seed");
  s->add_option("--temperature", synth.temperature, "Softmax temperature")->check(CLI::PositiveNumber);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Measure RTF and CR across bunching configurations");
  b->add_option("--weights-dir", bench.weights_dir, "Directory with <config>.blpc files; omit to generate weights");
  b->add_flag("--generate-missing", bench.generate_missing, "Generate weights for configs absent from --weights-dir");
  b->add_option("--frames", bench.options.frames, "Utterance length in frames")->check(CLI::PositiveNumber);
  b->add_option("--features", bench.features, "Use this feature file instead of generated frames");
  b->add_option("--repeat", bench.options.repeat, "Timed repeats per config (median reported)")->check(CLI::PositiveNumber);
  b->add_option("--warmup", bench.options.warmup, "Discarded warm-up runs per config")->check(CLI::NonNegativeNumber);
  b->add_option("--streams", bench.options.streams, "Concurrent independent streams")->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.options.seed, "Seed for generated weights, features and sampling");
  b->add_option("--config", bench.configs, "Restrict to these configs (e.g. s1_b80 s4_b74)");
  b->add_option("--report", bench.report, "JSON report path");
  b->add_flag("--no-pin", bench.no_pin, "Do not pin the timed thread to a core");
  b->add_flag("--quiet", bench.quiet, "No progress output");

  GenWeightsArgs gen;
  auto* g = app.add_subcommand("gen-weights", "Write deterministic random weights");
  g->add_option("--config", gen.configs, "Config names such as s4_b74");
  g->add_flag("--all", gen.all, "All eight evaluated configs");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--out", gen.out, "Output directory, or a .blpc file for a single config");

  GenFeaturesArgs feat;
  auto* f = app.add_subcommand("gen-features", "Write a synthetic feature file");
  f->add_option("--frames", feat.frames, "Number of frames");
  f->add_option("--seed", feat.seed, "Generator seed");
  f->add_option("--out", feat.out, "Output path")->required();

  VerifyCodecArgs codec;
  auto* v = app.add_subcommand("verify-codec", "Exhaustive mu-law round-trip and step-size audit");
  v->add_option("--bits", codec.bits, "Code width B")->check(CLI::Range(8, 16));
  v->add_option("--slope", codec.slope, "Slope factor w_s in (0, 1]");
  v->add_option("--show", codec.show, "Collapsed codes to list");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    return usage_error;
  }

  try
  {
    if (*s)
      return cmd_synth(synth);
    if (*b)
      return cmd_bench(bench);
    if (*g)
      return cmd_gen_weights(gen);
    if (*f)
      return cmd_gen_features(feat);
    if (*v)
      return cmd_verify_codec(codec);
  }
  catch (const Error& e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.code());
  }
  catch (const std::exception& e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return io_error;
  }
  return usage_error;
}
