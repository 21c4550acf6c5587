#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blpc/config.hpp"

namespace blpc
{

/// Relative cost of one activation evaluation (exp/tanh/sigmoid through
/// fast_exp plus a division) in multiply-accumulate units, fitted to the
/// vectorized kernels.
constexpr std::uint64_t kActivationCost = 8;

/// Relative cost of one addition whose operand comes from a GRU_A lookup
/// table. The tables (one 256-row table per input signal) exceed the L2 cache,
/// so each element is a memory read rather than a register add.
constexpr std::uint64_t kLookupCost = 6;

/// Operation counts of one layer over one frame (N samples).
struct LayerCost
{
  std::string name;
  std::uint64_t macs = 0;
  std::uint64_t adds = 0;
  std::uint64_t activations = 0;
  /// Additions of lookup-table rows (kept apart from `adds` for costing).
  std::uint64_t table_adds = 0;

  std::uint64_t cost() const noexcept
  {
    return macs + adds + kActivationCost * activations + kLookupCost * table_adds;
  }
  LayerCost& operator+=(const LayerCost& o) noexcept
  {
    macs += o.macs;
    adds += o.adds;
    activations += o.activations;
    table_adds += o.table_adds;
    return *this;
  }
};

/// Analytic operation counts derived from a config, per frame. Sample-rate
/// layers are multiplied out over the N/S steps or N samples of a frame, so
/// every count is an exact integer.
struct FlopReport
{
  int samples_per_frame = 0;
  std::vector<LayerCost> frn;
  std::vector<LayerCost> srn;

  LayerCost frn_total() const;
  LayerCost srn_total() const;
  std::uint64_t total_cost() const { return frn_total().cost() + srn_total().cost(); }
  double cost_per_sample() const { return static_cast<double>(total_cost()) / samples_per_frame; }
  const LayerCost& layer(const std::string& name) const;
  /// Dual FC multiply-accumulates per generated excitation (both heads).
  std::uint64_t dual_fc_macs_per_sample() const;
};

/// Throws Error(config_invalid) for invalid configs.
FlopReport count_flops(const ModelConfig& config);

/// Nonzero 16x1 blocks per GRU_A gate for the configured sparsity.
std::uint64_t gate_blocks(const ModelConfig& config, int gate);

/// total_cost(config) / total_cost(baseline).
double predicted_complexity_ratio(const ModelConfig& config, const ModelConfig& baseline);

} // namespace blpc
