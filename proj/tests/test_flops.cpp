#include <doctest.h>

#include "blpc/error.hpp"
#include "blpc/flops.hpp"

using namespace blpc;

namespace
{

const BitSplit k80{8, 0};
const BitSplit k74{7, 4};

double cr(int s, BitSplit split)
{
  return predicted_complexity_ratio(ModelConfig::for_mode(s, split), ModelConfig::for_mode(1, k80));
}

} // namespace

TEST_CASE("dual FC multiply-accumulates per excitation")
{
  const auto full = count_flops(ModelConfig::for_mode(1, k80));
  const auto split = count_flops(ModelConfig::for_mode(1, k74));
  CHECK(full.dual_fc_macs_per_sample() == 2 * 16 * 256);
  CHECK(full.dual_fc_macs_per_sample() == 8192);
  CHECK(split.dual_fc_macs_per_sample() == 2 * 16 * 128 + 2 * 16 * 16);
  CHECK(split.dual_fc_macs_per_sample() == 4608);
  const double cut = 1.0 - static_cast<double>(split.dual_fc_macs_per_sample()) / full.dual_fc_macs_per_sample();
  CHECK(cut == doctest::Approx(0.4375));
  // Per-excitation head cost does not depend on the bunch size.
  CHECK(count_flops(ModelConfig::for_mode(4, k74)).dual_fc_macs_per_sample() == 4608);
}

TEST_CASE("sample bunching at S=2 predicts about 72% of the baseline")
{
  const double ratio = cr(2, k80);
  MESSAGE("predicted CR s2_b80 = " << ratio);
  CHECK(ratio > 0.721 - 0.10);
  CHECK(ratio < 0.721 + 0.10);
}

TEST_CASE("predicted cost never increases with the bunch size")
{
  for (const BitSplit& split : {k80, k74})
  {
    double prev = 2.0;
    for (int s = 1; s <= 4; ++s)
    {
      const double ratio = cr(s, split);
      MESSAGE("predicted CR s" << s << " split " << split.high_bits << split.low_bits << " = " << ratio);
      CHECK(ratio > 0.0);
      CHECK(ratio <= 1.0);
      CHECK(ratio < prev);
      prev = ratio;
    }
    CHECK(cr(2, split) <= cr(1, split));
    CHECK(cr(4, split) <= cr(2, split));
  }
}

TEST_CASE("bit bunching gains more at S=4 than at S=1")
{
  const double gain1 = 1.0 - cr(1, k74) / cr(1, k80);
  const double gain4 = 1.0 - cr(4, k74) / cr(4, k80);
  MESSAGE("bit-bunching gain S=1 " << gain1 << ", S=4 " << gain4);
  CHECK(gain1 > 0.0);
  CHECK(gain4 > gain1);
}

TEST_CASE("report totals are sums of the layers")
{
  for (int s = 1; s <= 4; ++s)
    for (const BitSplit& split : {k80, k74})
    {
      const auto r = count_flops(ModelConfig::for_mode(s, split));
      LayerCost sum;
      for (const auto& l : r.frn)
        sum += l;
      for (const auto& l : r.srn)
        sum += l;
      CHECK(r.frn_total().cost() + r.srn_total().cost() == sum.cost());
      CHECK(r.total_cost() == sum.cost());
      CHECK(r.samples_per_frame == 240);
    }
}

TEST_CASE("frame-rate cost is independent of bunching")
{
  const auto base = count_flops(ModelConfig::for_mode(1, k80)).frn_total();
  for (int s = 1; s <= 4; ++s)
    for (const BitSplit& split : {k80, k74})
    {
      const auto r = count_flops(ModelConfig::for_mode(s, split)).frn_total();
      CHECK(r.macs == base.macs);
      CHECK(r.adds == base.adds);
      CHECK(r.activations == base.activations);
    }
}

TEST_CASE("GRU_A work is amortized over the bunch")
{
  const auto r1 = count_flops(ModelConfig::for_mode(1, k80));
  const auto r4 = count_flops(ModelConfig::for_mode(4, k80));
  CHECK(r1.layer("gru_a_recurrent").macs == 4 * r4.layer("gru_a_recurrent").macs);
  CHECK(r1.layer("gru_a_recurrent").macs == 240ull * 16 * (92 + 92 + 922));
  // Lookup rows are additions: 3S rows of 3A per step, i.e. 9A per sample for any S.
  CHECK(r1.layer("gru_a_lookup").macs == 0);
  CHECK(r1.layer("gru_a_lookup").table_adds == 240ull * 9 * 384);
  CHECK(r1.layer("gru_a_lookup").table_adds == r4.layer("gru_a_lookup").table_adds);
  CHECK_THROWS_AS(r1.layer("no_such_layer"), Error);
}

TEST_CASE("block counts follow the configured sparsity")
{
  const auto cfg = ModelConfig::for_mode(1, k80);
  CHECK(gate_blocks(cfg, 0) == 92);
  CHECK(gate_blocks(cfg, 1) == 92);
  CHECK(gate_blocks(cfg, 2) == 922);
}

TEST_CASE("invalid configs are rejected")
{
  auto cfg = ModelConfig::for_mode(1, k80);
  cfg.bunch_size = 5;
  CHECK_THROWS_AS(count_flops(cfg), Error);
}
