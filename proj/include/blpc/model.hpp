#pragma once

#include <array>
#include <span>
#include <vector>

#include "blpc/aligned.hpp"
#include "blpc/codec.hpp"
#include "blpc/config.hpp"
#include "blpc/kernels.hpp"
#include "blpc/lpc.hpp"
#include "blpc/weights.hpp"

namespace blpc
{

/// Network input for one frame: the 20 cepstra, the pitch period mapped to
/// (period - 200) / 100 and the pitch correlation.
std::array<float, kFeatureDim> frame_network_input(const FeatureFrame& frame);

struct FrnWorkspace
{
  FloatBuffer inputs;
  FloatBuffer h1;
  FloatBuffer h2;
  FloatBuffer d1;

  void reserve(std::size_t frames, int dim);
};

/// Frame-rate network: conv(k=3) -> tanh -> conv(k=3) -> tanh (+ residual)
/// -> dense -> tanh -> dense -> tanh. Each convolution zero-pads its own input
/// at utterance edges, so frame t depends on frames t-2..t+2 only.
class FrameRateNetwork
{
public:
  FrameRateNetwork() = default;
  static FrameRateNetwork from_store(const WeightStore& store);

  int dim() const noexcept { return dense2_.rows(); }

  /// out holds frames.size() * dim() values, frame-major.
  void forward(std::span<const FeatureFrame> frames, std::span<float> out, FrnWorkspace& ws) const;
  std::vector<float> forward(std::span<const FeatureFrame> frames) const;
  /// Conditioning of frame t, computed from its receptive field only.
  std::vector<float> forward_at(std::span<const FeatureFrame> frames, std::size_t t) const;

private:
  DenseMatrix conv1_; // F x (3 * 22), taps t-1, t, t+1
  FloatBuffer conv1_bias_;
  DenseMatrix conv2_; // F x (3 * F)
  FloatBuffer conv2_bias_;
  DenseMatrix dense1_;
  FloatBuffer dense1_bias_;
  DenseMatrix dense2_;
  FloatBuffer dense2_bias_;
};

/// Inference-ready weights: dense matrices in kernel layout, GRU_A input
/// lookup tables and codec tables. Immutable after construction and safe to
/// share between threads.
struct Model
{
  ModelConfig config;
  MuLawTable codec;
  FrameRateNetwork frn;

  /// One table per GRU_A input signal, ordered samples, predictions,
  /// excitations (oldest first within each group).
  std::vector<InputLookupTable> gru_a_tables{};
  DenseMatrix gru_a_cond{};
  FloatBuffer gru_a_input_bias{};
  BlockSparseMatrix gru_a_recurrent{};
  FloatBuffer gru_a_recurrent_bias{};

  DenseMatrix gru_b_input{}; // columns: GRU_A state, then frame conditioning
  FloatBuffer gru_b_input_bias{};
  DenseMatrix gru_b_recurrent{};
  FloatBuffer gru_b_recurrent_bias{};

  EmbeddingTable context_high{}; // empty when the split has no low bits
  EmbeddingTable context_full{};
  std::vector<DualFc> heads_high{}; // one per bunch position
  std::vector<DualFc> heads_low{};

  /// Validates the store and precomputes the lookup tables.
  static Model build(const WeightStore& store);

  /// GRU_A embedding index of a B-bit code.
  int input_index(int code) const noexcept { return code >> (config.code_bits() - config.input_code_bits); }
};

DualFc load_dual_fc(const WeightStore& store, const std::string& prefix);

} // namespace blpc
