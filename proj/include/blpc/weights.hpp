#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "blpc/config.hpp"
#include "blpc/kernels.hpp"

namespace blpc
{

/// Dense float32 tensor, row-major.
struct Tensor
{
  std::vector<std::uint32_t> shape;
  std::vector<float> values;

  bool operator==(const Tensor&) const = default;
};

struct TensorSpec
{
  std::string name;
  std::vector<std::uint32_t> shape;
  bool sparse = false;
};

/// Every tensor a config requires, in file order.
///
///   frn.conv{1,2}.weight      [F, 3, in]   taps ordered t-1, t, t+1
///   frn.dense{1,2}.weight     [F, F]
///   gru_a.embed.{sample,prediction,excitation}  [2^input_bits, E]
///   gru_a.input_weight        [3A, 3S*E]   column blocks: samples, predictions, excitations (oldest first)
///   gru_a.cond_weight         [3A, F]
///   gru_a.recurrent_weight    [3A, A]      block-sparse 16x1
///   gru_b.input_weight        [3B, A+F]    columns: GRU_A state then frame conditioning
///   context.embed.high        [2^B_h, B]   only when B_l > 0
///   context.embed.full        [2^B, B]
///   dual_fc.<i>.{high,low}.{w1,w2} [K, B], .{a1,a2} [K] for each bunch position i
std::vector<TensorSpec> expected_tensors(const ModelConfig& config);

/// Named-tensor container. Immutable once loaded; safe to share across threads.
class WeightStore
{
public:
  ModelConfig config;
  std::map<std::string, Tensor> dense;
  std::map<std::string, BlockSparseMatrix> sparse;

  /// Throws Error(missing_tensor) naming the tensor if absent.
  const Tensor& tensor(const std::string& name) const;
  const BlockSparseMatrix& sparse_tensor(const std::string& name) const;

  /// Checks the config and that the tensor set matches expected_tensors exactly.
  /// Throws Error(config_invalid | missing_tensor | shape_mismatch | format).
  void validate() const;
};

bool operator==(const WeightStore& a, const WeightStore& b);

constexpr std::uint32_t kWeightFormatVersion = 1;

std::vector<std::uint8_t> serialize_weights(const WeightStore& store);
/// Throws Error(bad_magic | version_mismatch | checksum | config_invalid |
/// missing_tensor | shape_mismatch | format).
WeightStore deserialize_weights(std::span<const std::uint8_t> bytes);

void save_weights(const WeightStore& store, const std::filesystem::path& path);
/// Throws Error(io) if the file cannot be read, otherwise as deserialize_weights.
WeightStore load_weights(const std::filesystem::path& path);

/// Deterministic random weights: uniform in [-0.1, 0.1] from Rng(seed), with
/// round(capacity * (1 - sparsity)) recurrent blocks per gate placed by a
/// seeded partial shuffle.
WeightStore generate_test_weights(std::uint64_t seed, const ModelConfig& config);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace blpc
