#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "blpc/lpc.hpp"
#include "blpc/model.hpp"
#include "blpc/sampling.hpp"

namespace blpc
{

constexpr int kMaxBunch = 4;

/// Autoregressive carry-over between network steps.
struct SrnState
{
  FloatBuffer gru_a;
  FloatBuffer gru_b;
  /// s_{t-S} .. s_{t-1}.
  std::vector<float> last_samples;
  /// e_{t-S} .. e_{t-1} as B-bit codes.
  std::vector<int> last_excitations;
  /// p_{t-S+1} .. p_t; the last entry predicts the next sample.
  std::vector<float> last_predictions;
  /// Last M reconstructed samples, most recent last.
  FloatBuffer history;
  Rng rng;
  bool initialized = false;

  bool operator==(const SrnState&) const = default;
};

/// Zero GRU states, silent histories (excitation code 2^(B-1), linear 0) and
/// an RNG seeded with `seed`.
SrnState init_state(const ModelConfig& config, std::uint64_t seed);

/// The S samples of one step. For every i:
///   samples[i] == clamp16(predictions[i] + decode(excitation_codes[i])).
struct BunchOutput
{
  int count = 0;
  std::array<std::int16_t, kMaxBunch> samples{};
  std::array<int, kMaxBunch> excitation_codes{};
  std::array<int, kMaxBunch> high_codes{};
  std::array<int, kMaxBunch> low_codes{};
  std::array<float, kMaxBunch> predictions{};
};

/// Receives the context vector around every emitted excitation; used by tests
/// to audit the additive context recurrence.
class StepObserver
{
public:
  virtual ~StepObserver() = default;
  virtual void on_excitation(int position, std::span<const float> context_before, int code,
                             std::span<const float> context_after) = 0;
};

/// Optimized sample-rate network. Holds per-frame caches and scratch buffers
/// so that step() never allocates; one instance per synthesis stream.
class SampleRateNetwork
{
public:
  explicit SampleRateNetwork(const Model& model);

  const Model& model() const noexcept { return *model_; }

  /// Caches the frame-conditioning contributions (U_f f + b) of both GRUs.
  void set_frame(std::span<const float> conditioning);

  /// One network step: GRU_A and GRU_B advance once, then S excitations are
  /// sampled and S samples reconstructed. Throws Error(invalid_input) if the
  /// state is uninitialized, does not match the config, or no frame is set.
  BunchOutput step(SrnState& state, const LpcCoeffs& lpc, float temperature = 1.0f, StepObserver* observer = nullptr);

  /// GRU_B output of the most recent step.
  std::span<const float> context() const noexcept { return gru_b_out_; }
  std::uint64_t steps() const noexcept { return steps_; }

private:
  const Model* model_;
  bool frame_set_ = false;
  std::uint64_t steps_ = 0;
  FloatBuffer cond_a_;
  FloatBuffer cond_b_;
  FloatBuffer x_a_;
  FloatBuffer g_a_;
  FloatBuffer x_b_;
  FloatBuffer g_b_;
  FloatBuffer gru_b_out_;
  FloatBuffer c_high_;
  FloatBuffer c_low_;
  FloatBuffer c_before_;
  FloatBuffer logits_high_;
  FloatBuffer logits_low_;
  FloatBuffer head_scratch_;
  FloatBuffer probs_;
};

/// Stateless convenience form: caches f, then steps once.
BunchOutput srn_step(const Model& model, SrnState& state, std::span<const float> conditioning, const LpcCoeffs& lpc,
                     float temperature = 1.0f);

/// Throws Error(invalid_input) unless the state was initialized for `config`.
void check_state(const SrnState& state, const ModelConfig& config);

} // namespace blpc
