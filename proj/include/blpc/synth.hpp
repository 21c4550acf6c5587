#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "blpc/model.hpp"
#include "blpc/srn.hpp"

namespace blpc
{

struct SynthStats
{
  std::size_t frames = 0;
  std::size_t samples = 0;
  std::uint64_t network_steps = 0;
  std::uint64_t rng_draws = 0;
};

/// Feature frames -> PCM for one stream. Per frame: frame network output,
/// LPC from the cepstrum, then N/S network steps. After reserve() (or one run
/// of the same length) run_into() performs no heap allocation.
class Synthesizer
{
public:
  explicit Synthesizer(const Model& model);

  void reserve(std::size_t frames);

  /// out must hold frames.size() * N samples.
  SynthStats run_into(std::span<const FeatureFrame> frames, std::uint64_t seed, float temperature,
                      std::span<std::int16_t> out);
  std::vector<std::int16_t> run(std::span<const FeatureFrame> frames, std::uint64_t seed, float temperature = 1.0f);

  const SynthStats& last_stats() const noexcept { return stats_; }

private:
  const Model* model_;
  SampleRateNetwork srn_;
  SrnState state_;
  FrnWorkspace frn_ws_;
  FloatBuffer conditioning_;
  SynthStats stats_;
};

std::vector<std::int16_t> synthesize(std::span<const FeatureFrame> frames, const Model& model, std::uint64_t seed,
                                     float temperature = 1.0f);

} // namespace blpc
