#pragma once

#include <array>
#include <string>

#include "blpc/codec.hpp"

namespace blpc
{

/// Architectural hyperparameters of one bunched vocoder.
struct ModelConfig
{
  /// Samples emitted per sample-rate-network step (S).
  int bunch_size = 1;
  BitSplit split{8, 0};
  /// mu-law slope factor w_s for B = split.total_bits().
  double mu_slope = 1.0;
  int gru_a_units = 384;
  /// Also the width of the context vector c fed to the dual FC heads.
  int gru_b_units = 16;
  int frn_dim = 128;
  /// Width of the sample/prediction/excitation embeddings feeding GRU_A.
  int embed_dim = 128;
  /// GRU_A input embeddings index codes reduced to this many bits.
  int input_code_bits = 8;
  int lpc_order = 16;
  int frame_size = 240;
  int sample_rate = 24000;
  /// Fraction of zero weights per GRU_A recurrent gate (update, reset, candidate).
  std::array<double, 3> sparsity{0.99, 0.99, 0.9};

  /// Default config for one of the evaluated modes; w_s = 1 for unsplit
  /// codes and 0.08 when low bits are present.
  static ModelConfig for_mode(int bunch_size, BitSplit split);

  /// Throws Error(config_invalid) describing the first violated constraint.
  void validate() const;

  MuLawSpec mu_spec() const { return MuLawSpec(split.total_bits(), mu_slope); }
  int code_bits() const noexcept { return split.total_bits(); }
  int high_codes() const noexcept { return 1 << split.high_bits; }
  int low_codes() const noexcept { return 1 << split.low_bits; }
  int full_codes() const noexcept { return 1 << split.total_bits(); }
  int input_codes() const noexcept { return 1 << input_code_bits; }
  /// GRU_A input signals per step: S samples, S predictions, S excitations.
  int input_signals() const noexcept { return 3 * bunch_size; }
  int steps_per_frame() const noexcept { return frame_size / bunch_size; }
  double frame_seconds() const noexcept { return static_cast<double>(frame_size) / sample_rate; }

  /// Short tag such as "s4_b74".
  std::string name() const;
  /// Inverse of name() for the evaluated modes. Throws Error(config_invalid).
  static ModelConfig from_name(const std::string& name);

  bool operator==(const ModelConfig&) const = default;
};

} // namespace blpc
