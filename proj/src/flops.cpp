#include "blpc/flops.hpp"

#include <cmath>

#include "blpc/error.hpp"
#include "blpc/lpc.hpp"

namespace blpc
{

LayerCost FlopReport::frn_total() const
{
  LayerCost total{"frn"};
  for (const auto& l : frn)
    total += l;
  return total;
}

LayerCost FlopReport::srn_total() const
{
  LayerCost total{"srn"};
  for (const auto& l : srn)
    total += l;
  return total;
}

const LayerCost& FlopReport::layer(const std::string& name) const
{
  for (const auto* group : {&frn, &srn})
    for (const auto& l : *group)
      if (l.name == name)
        return l;
  throw Error(Errc::invalid_input, "no layer named " + name);
}

std::uint64_t FlopReport::dual_fc_macs_per_sample() const
{
  std::uint64_t macs = 0;
  for (const auto& l : srn)
    if (l.name.rfind("dual_fc", 0) == 0)
      macs += l.macs;
  return macs / static_cast<std::uint64_t>(samples_per_frame);
}

std::uint64_t gate_blocks(const ModelConfig& config, int gate)
{
  const auto a = static_cast<std::uint64_t>(config.gru_a_units);
  const double capacity = static_cast<double>(a / 16 * a);
  return static_cast<std::uint64_t>(std::llround(capacity * (1.0 - config.sparsity[static_cast<std::size_t>(gate)])));
}

FlopReport count_flops(const ModelConfig& config)
{
  config.validate();
  using u64 = std::uint64_t;
  const u64 n = static_cast<u64>(config.frame_size);
  const u64 steps = static_cast<u64>(config.steps_per_frame());
  const u64 s = static_cast<u64>(config.bunch_size);
  const u64 a = static_cast<u64>(config.gru_a_units);
  const u64 b = static_cast<u64>(config.gru_b_units);
  const u64 f = static_cast<u64>(config.frn_dim);
  const u64 feat = kFeatureDim;
  const u64 m = static_cast<u64>(config.lpc_order);
  const u64 kh = static_cast<u64>(config.high_codes());
  const u64 kl = config.split.bunched() ? static_cast<u64>(config.low_codes()) : 0;

  FlopReport r;
  r.samples_per_frame = config.frame_size;

  // Frame-rate work: runs once per frame whatever S and B are.
  r.frn.push_back({"frn_conv1", 3 * feat * f, f, f});
  r.frn.push_back({"frn_conv2", 3 * f * f, 2 * f, f});
  r.frn.push_back({"frn_dense1", f * f, f, f});
  r.frn.push_back({"frn_dense2", f * f, f, f});
  // inverse DCT, 17 autocorrelation lags over 241 bins, Levinson-Durbin.
  r.frn.push_back({"lpc_analysis", kNumBands * kNumBands + (m + 1) * kSpectrumBins + m * m, m, kNumBands});
  r.frn.push_back({"gru_a_condition", 3 * a * f, 3 * a, 0});
  r.frn.push_back({"gru_b_condition", 3 * b * f, 3 * b, 0});

  u64 recurrent_blocks = 0;
  for (int g = 0; g < 3; ++g)
    recurrent_blocks += gate_blocks(config, g);

  // Per network step, multiplied by the N/S steps of a frame.
  r.srn.push_back({"gru_a_lookup", 0, 0, 0, steps * 3 * s * 3 * a});
  r.srn.push_back({"gru_a_recurrent", steps * recurrent_blocks * 16, steps * 3 * a, 0});
  r.srn.push_back({"gru_a_gates", 0, steps * 6 * a, steps * 3 * a});
  r.srn.push_back({"gru_b_input", steps * 3 * b * a, steps * 3 * b, 0});
  r.srn.push_back({"gru_b_recurrent", steps * 3 * b * b, steps * 3 * b, 0});
  r.srn.push_back({"gru_b_gates", 0, steps * 6 * b, steps * 3 * b});

  // Per generated sample.
  r.srn.push_back({"dual_fc_high", n * 2 * b * kh, n * 2 * kh, n * 2 * kh});
  if (kl > 0)
    r.srn.push_back({"dual_fc_low", n * 2 * b * kl, n * 2 * kl, n * 2 * kl});
  r.srn.push_back({"softmax", 0, n * 2 * (kh + kl), n * (kh + kl)});
  r.srn.push_back({"context_embedding", 0, n * b * (kl > 0 ? 2 : 1), 0});
  r.srn.push_back({"lpc_prediction", n * m, n, 0});
  return r;
}

double predicted_complexity_ratio(const ModelConfig& config, const ModelConfig& baseline)
{
  const auto num = count_flops(config);
  const auto den = count_flops(baseline);
  return num.cost_per_sample() / den.cost_per_sample();
}

} // namespace blpc
