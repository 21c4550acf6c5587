#include "blpc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <sched.h>

#include <json.hpp>

#include "blpc/error.hpp"
#include "blpc/flops.hpp"
#include "blpc/model.hpp"
#include "blpc/sampling.hpp"
#include "blpc/synth.hpp"
#include "blpc/weights.hpp"

#ifndef BLPC_BUILD_DESCRIPTION
#define BLPC_BUILD_DESCRIPTION "unknown"
#endif

namespace blpc
{

namespace
{

constexpr const char* kBaseline = "s1_b80";

std::string cpu_model()
{
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("model name", 0) == 0)
    {
      const auto colon = line.find(':');
      if (colon != std::string::npos)
        return line.substr(line.find_first_not_of(' ', colon + 1));
    }
  return "unknown";
}

std::string compiler()
{
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

int pin_to_current_core()
{
  const int cpu = sched_getcpu();
  if (cpu < 0)
    return -1;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  return sched_setaffinity(0, sizeof(set), &set) == 0 ? cpu : -1;
}

void unpin()
{
  cpu_set_t set;
  CPU_ZERO(&set);
  const unsigned n = std::max(1u, std::thread::hardware_concurrency());
  for (unsigned i = 0; i < n && i < CPU_SETSIZE; ++i)
    CPU_SET(i, &set);
  sched_setaffinity(0, sizeof(set), &set);
}

} // namespace

std::vector<FeatureFrame> demo_features(std::size_t frames, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<FeatureFrame> out(frames);
  std::array<float, kNumBands> target{};
  std::array<float, kNumBands> current{};
  for (std::size_t t = 0; t < frames; ++t)
  {
    if (t % 20 == 0)
      for (int k = 0; k < kNumBands; ++k)
        target[static_cast<std::size_t>(k)] =
          static_cast<float>(k == 0 ? 6.0 + 6.0 * rng.uniform() : (2.0 * rng.uniform() - 1.0) * 1.5 / (1 + k / 4));
    for (std::size_t k = 0; k < current.size(); ++k)
      current[k] += 0.2f * (target[k] - current[k]);
    out[t].cepstrum = current;
    out[t].pitch_period = static_cast<float>(100.0 + 60.0 * std::sin(0.05 * static_cast<double>(t)));
    out[t].pitch_correlation = static_cast<float>(rng.uniform());
  }
  return out;
}

namespace
{

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Stream
{
  explicit Stream(const Model& model, std::size_t samples)
  : synth(model)
  , pcm(samples)
  {
  }
  Synthesizer synth;
  std::vector<std::int16_t> pcm;
};

struct Subject
{
  ConfigResult result;
  std::unique_ptr<Model> model;
  std::vector<std::unique_ptr<Stream>> streams;
};

// One timed synthesis of the utterance on every stream; returns wall seconds.
double timed_run(Subject& subject, std::span<const FeatureFrame> features, const BenchOptions& options)
{
  const auto start = std::chrono::steady_clock::now();
  if (subject.streams.size() == 1)
  {
    auto& s = *subject.streams.front();
    s.synth.run_into(features, options.seed, options.temperature, s.pcm);
  }
  else
  {
    std::vector<std::jthread> threads;
    threads.reserve(subject.streams.size());
    for (auto& s : subject.streams)
      threads.emplace_back([&s, features, &options] { s->synth.run_into(features, options.seed, options.temperature, s->pcm); });
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

} // namespace

std::vector<ModelConfig> evaluated_configs()
{
  std::vector<ModelConfig> configs;
  for (const BitSplit split : {BitSplit{8, 0}, BitSplit{7, 4}})
    for (int s = 1; s <= 4; ++s)
      configs.push_back(ModelConfig::for_mode(s, split));
  return configs;
}

const ConfigResult& BenchReport::result(const std::string& name) const
{
  for (const auto& r : results)
    if (r.config.name() == name)
      return r;
  throw Error(Errc::invalid_input, "no benchmark result for " + name);
}

std::vector<std::filesystem::path> missing_weight_files(const BenchOptions& options)
{
  std::vector<std::filesystem::path> missing;
  if (options.weights_dir.empty())
    return missing;
  for (const auto& cfg : options.configs)
  {
    const auto path = options.weights_dir / (cfg.name() + ".blpc");
    if (!std::filesystem::exists(path))
      missing.push_back(path);
  }
  return missing;
}

BenchReport run_bench(const BenchOptions& options, std::ostream* progress)
{
  if (options.repeat < 1 || options.warmup < 0 || options.streams < 1)
    throw Error(Errc::invalid_input, "repeat and streams must be at least 1, warmup at least 0");
  if (options.configs.empty())
    throw Error(Errc::invalid_input, "no configurations to benchmark");
  const auto missing = missing_weight_files(options);
  if (!missing.empty() && !options.generate_missing)
  {
    std::string list;
    for (const auto& p : missing)
      list += "\n  " + p.string();
    throw Error(Errc::io, "missing weight files for " + std::to_string(missing.size()) + " configs:" + list);
  }

  const std::vector<FeatureFrame> features =
    options.features.empty() ? demo_features(options.frames, options.seed) : options.features;

  BenchReport report;
  report.options = options;
  report.options.frames = features.size();
  report.machine = {cpu_model(), std::thread::hardware_concurrency(), compiler(), BLPC_BUILD_DESCRIPTION, -1};

  // Load everything up front so the timed region only synthesizes.
  std::vector<Subject> subjects;
  subjects.reserve(options.configs.size());
  for (const auto& cfg : options.configs)
  {
    Subject subject;
    const auto path = options.weights_dir.empty() ? std::filesystem::path{} : options.weights_dir / (cfg.name() + ".blpc");
    WeightStore store;
    if (!path.empty() && std::filesystem::exists(path))
    {
      store = load_weights(path);
      if (!(store.config == cfg))
        throw Error(Errc::config_invalid, "'" + path.string() + "' holds config " + store.config.name() +
                                            ", expected " + cfg.name());
      subject.result.weights_source = path.string();
    }
    else
    {
      store = generate_test_weights(options.seed, cfg);
      subject.result.weights_source = "generated";
    }
    subject.result.config = cfg;
    subject.model = std::make_unique<Model>(Model::build(store));
    const std::size_t samples = features.size() * static_cast<std::size_t>(cfg.frame_size);
    for (int i = 0; i < options.streams; ++i)
    {
      subject.streams.push_back(std::make_unique<Stream>(*subject.model, samples));
      subject.streams.back()->synth.reserve(features.size());
    }
    subject.result.audio_seconds = static_cast<double>(samples) / cfg.sample_rate;
    subject.result.predicted_cr = predicted_complexity_ratio(cfg, ModelConfig::for_mode(1, {8, 0}));
    subjects.push_back(std::move(subject));
    if (progress)
      *progress << "loaded " << cfg.name() << " (" << subjects.back().result.weights_source << ")\n";
  }

  if (options.pin && options.streams == 1)
    report.machine.pinned_core = pin_to_current_core();

  // Round-robin so that slow drifts (thermal, frequency) hit every config alike.
  for (int round = 0; round < options.warmup + options.repeat; ++round)
  {
    for (auto& subject : subjects)
    {
      const double wall = timed_run(subject, features, options);
      if (round >= options.warmup)
        subject.result.wall_seconds.push_back(wall);
    }
    if (progress)
      *progress << (round < options.warmup ? "warm-up " : "repeat ") << round + 1 << "/"
                << options.warmup + options.repeat << " done\n";
  }
  if (report.machine.pinned_core >= 0)
    unpin();

  for (auto& subject : subjects)
  {
    auto& r = subject.result;
    const auto& first = *subject.streams.front();
    r.median_wall_seconds = median(r.wall_seconds);
    r.rtf = r.median_wall_seconds / r.audio_seconds;
    r.network_steps = first.synth.last_stats().network_steps;
    r.rng_draws = first.synth.last_stats().rng_draws;
    r.samples = first.synth.last_stats().samples;
    for (const auto& s : subject.streams)
      r.streams_consistent = r.streams_consistent && s->pcm == first.pcm;
    report.results.push_back(r);
  }
  double base_rtf = 0.0;
  for (const auto& r : report.results)
    if (r.config.name() == kBaseline)
      base_rtf = r.rtf;
  for (auto& r : report.results)
    r.cr = base_rtf > 0.0 ? r.rtf / base_rtf : 0.0;
  return report;
}

std::string report_json(const BenchReport& report)
{
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = "blpc-bench/1";
  doc["machine"] = {{"cpu", report.machine.cpu},
                    {"logical_cores", report.machine.logical_cores},
                    {"compiler", report.machine.compiler},
                    {"build", report.machine.build},
                    {"pinned_core", report.machine.pinned_core}};
  const auto& o = report.options;
  doc["settings"] = {{"frames", o.frames},         {"repeat", o.repeat},
                     {"warmup", o.warmup},         {"streams", o.streams},
                     {"seed", o.seed},             {"temperature", o.temperature},
                     {"baseline", kBaseline},      {"activation_cost", kActivationCost},
                     {"lookup_cost", kLookupCost}};
  ordered_json configs = ordered_json::array();
  for (const auto& r : report.results)
  {
    configs.push_back({{"name", r.config.name()},
                       {"bunch_size", r.config.bunch_size},
                       {"split", {r.config.split.high_bits, r.config.split.low_bits}},
                       {"mu_slope", r.config.mu_slope},
                       {"weights", r.weights_source},
                       {"audio_seconds", r.audio_seconds},
                       {"samples", r.samples},
                       {"network_steps", r.network_steps},
                       {"rng_draws", r.rng_draws},
                       {"wall_seconds", r.wall_seconds},
                       {"median_wall_seconds", r.median_wall_seconds},
                       {"rtf", r.rtf},
                       {"cr", r.cr},
                       {"predicted_cr", r.predicted_cr},
                       {"cr_error_pp", 100.0 * (r.predicted_cr - r.cr)},
                       {"streams_consistent", r.streams_consistent}});
  }
  doc["configs"] = std::move(configs);
  return doc.dump(2) + "\n";
}

std::string report_table(const BenchReport& report)
{
  std::ostringstream out;
  out << std::left << std::setw(9) << "config" << std::right << std::setw(10) << "RTF" << std::setw(9) << "CR"
      << std::setw(11) << "predicted" << '\n';
  out << std::fixed;
  for (const auto& r : report.results)
    out << std::left << std::setw(9) << r.config.name() << std::right << std::setprecision(4) << std::setw(10) << r.rtf
        << std::setprecision(1) << std::setw(8) << 100.0 * r.cr << '%' << std::setw(10) << 100.0 * r.predicted_cr
        << "%\n";
  return out.str();
}

} // namespace blpc
