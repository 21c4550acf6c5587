#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "blpc/lpc.hpp"
#include "blpc/model.hpp"
#include "blpc/sampling.hpp"

namespace blpc
{

/// Classic one-sample-per-step vocoder loop (S = 1, no bit split), written
/// without any bunching machinery. Serves as the reference the S = 1 bunched
/// path must reproduce exactly.
class BaselineVocoder
{
public:
  struct State
  {
    std::vector<float> gru_a;
    std::vector<float> gru_b;
    float last_sample = 0.0f;
    int last_excitation = 0;
    float prediction = 0.0f;
    std::vector<float> history;
    Rng rng;
  };

  /// Throws Error(config_invalid) unless the model has S = 1 and no low bits.
  explicit BaselineVocoder(const Model& model);

  State init(std::uint64_t seed) const;
  void set_frame(std::span<const float> conditioning);
  std::int16_t next_sample(State& state, const LpcCoeffs& lpc, float temperature = 1.0f);

  std::vector<std::int16_t> synthesize(std::span<const FeatureFrame> frames, std::uint64_t seed,
                                       float temperature = 1.0f);
  /// RNG draws consumed by the last synthesize() call.
  std::uint64_t last_draws() const noexcept { return last_draws_; }

private:
  const Model* model_;
  std::vector<float> cond_a_;
  std::vector<float> cond_b_;
  std::vector<float> x_a_;
  std::vector<float> g_a_;
  std::vector<float> x_b_;
  std::vector<float> g_b_;
  std::vector<float> logits_;
  std::vector<float> scratch_;
  std::vector<float> probs_;
  std::uint64_t last_draws_ = 0;
};

} // namespace blpc
