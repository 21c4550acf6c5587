#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "blpc/config.hpp"
#include "blpc/lpc.hpp"

namespace blpc
{

/// The eight evaluated modes: S in 1..4 times splits (8,0) and (7,4).
std::vector<ModelConfig> evaluated_configs();

struct BenchOptions
{
  /// Directory holding <name>.blpc files (e.g. s4_b74.blpc). Empty: generate
  /// every model from `seed`.
  std::filesystem::path weights_dir;
  /// With a weights directory, generate configs whose file is absent instead
  /// of failing.
  bool generate_missing = false;
  std::uint64_t seed = 1;
  /// Utterance length; features are random unless `features` is non-empty.
  std::size_t frames = 100;
  std::vector<FeatureFrame> features;
  int repeat = 5;
  int warmup = 1;
  /// Concurrent independent streams sharing one model per config.
  int streams = 1;
  /// Pin the timed thread to the core it starts on.
  bool pin = true;
  float temperature = 1.0f;
  std::vector<ModelConfig> configs = evaluated_configs();
};

struct ConfigResult
{
  ModelConfig config;
  std::string weights_source;
  double audio_seconds = 0.0;
  /// One entry per timed repeat (warm-up excluded).
  std::vector<double> wall_seconds;
  double median_wall_seconds = 0.0;
  double rtf = 0.0;
  /// rtf / rtf(s1_b80).
  double cr = 0.0;
  double predicted_cr = 0.0;
  std::uint64_t network_steps = 0;
  std::uint64_t rng_draws = 0;
  std::size_t samples = 0;
  /// All streams produced the same PCM (always true for one stream).
  bool streams_consistent = true;
};

struct MachineInfo
{
  std::string cpu;
  unsigned logical_cores = 0;
  std::string compiler;
  std::string build;
  int pinned_core = -1;
};

struct BenchReport
{
  MachineInfo machine;
  BenchOptions options;
  std::vector<ConfigResult> results;

  /// Throws Error(invalid_input) if the config was not benchmarked.
  const ConfigResult& result(const std::string& name) const;
};

/// Deterministic stand-in utterance for benchmarks and demos: slowly moving
/// cepstral trajectories and a gliding pitch.
std::vector<FeatureFrame> demo_features(std::size_t frames, std::uint64_t seed);

/// Missing weight files for the requested configs (empty when weights are generated).
std::vector<std::filesystem::path> missing_weight_files(const BenchOptions& options);

/// Loads or generates every model, then times synthesis round-robin across
/// configs: warm-up runs are discarded and the median of `repeat` runs is
/// reported. Feature loading and model construction stay outside the timed
/// region. Throws Error(io) listing missing weight files.
BenchReport run_bench(const BenchOptions& options, std::ostream* progress = nullptr);

/// JSON document described in docs/bench_report.md.
std::string report_json(const BenchReport& report);

/// Fixed-width table for terminals.
std::string report_table(const BenchReport& report);

} // namespace blpc
