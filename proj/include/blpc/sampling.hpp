#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace blpc
{

/// Seedable generator behind every sampling decision: std::mt19937_64, whose
/// output sequence is fixed by the C++ standard. Uniform draws take the top
/// 53 bits, so results are identical on every conforming platform.
class Rng
{
public:
  explicit Rng(std::uint64_t seed = 0)
  : engine_(seed)
  {
  }

  /// Uniform in [0, 1).
  double uniform() noexcept
  {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t draws() const noexcept { return draws_; }

  bool operator==(const Rng&) const = default;

private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// probs = softmax(logits / temperature). Throws Error(numeric) on non-finite
/// logits and Error(invalid_input) for temperature <= 0 or size mismatch.
void softmax(std::span<const float> logits, float temperature, std::span<float> probs);

/// Categorical draw from softmax(logits / temperature) with exactly one
/// rng.uniform() call. scratch needs logits.size() floats.
int softmax_sample(std::span<const float> logits, Rng& rng, float temperature, std::span<float> scratch);

} // namespace blpc
