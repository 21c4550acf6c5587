#include "blpc/config.hpp"

#include <cctype>

#include "blpc/error.hpp"
#include "blpc/lpc.hpp"

namespace blpc
{

ModelConfig ModelConfig::for_mode(int bunch_size, BitSplit split)
{
  ModelConfig cfg;
  cfg.bunch_size = bunch_size;
  cfg.split = split;
  cfg.mu_slope = split.bunched() ? 0.08 : 1.0;
  return cfg;
}

void ModelConfig::validate() const
{
  auto fail = [](const std::string& what) { throw Error(Errc::config_invalid, what); };
  if (bunch_size < 1 || bunch_size > 4)
    fail("bunch size must be in {1,2,3,4}, got " + std::to_string(bunch_size));
  if (frame_size <= 0 || frame_size % bunch_size != 0)
    fail("frame size " + std::to_string(frame_size) + " is not divisible by bunch size " + std::to_string(bunch_size));
  if (split.high_bits < 1 || split.low_bits < 0)
    fail("invalid bit split");
  if (split.total_bits() < 8 || split.total_bits() > 16)
    fail("code bits must be in [8, 16], got " + std::to_string(split.total_bits()));
  try
  {
    (void)mu_spec();
  }
  catch (const Error& e)
  {
    fail(e.what());
  }
  if (input_code_bits < 1 || input_code_bits > split.total_bits())
    fail("input code bits must be in [1, " + std::to_string(split.total_bits()) + "]");
  if (gru_a_units <= 0 || gru_a_units % 16 != 0)
    fail("GRU_A units must be a positive multiple of 16");
  if (gru_b_units <= 0 || frn_dim <= 0 || embed_dim <= 0)
    fail("layer widths must be positive");
  if (lpc_order != kLpcOrder)
    fail("LPC order must be " + std::to_string(kLpcOrder));
  if (sample_rate <= 0)
    fail("sample rate must be positive");
  for (double s : sparsity)
    if (!(s >= 0.0 && s < 1.0))
      fail("sparsity must be in [0, 1)");
}

std::string ModelConfig::name() const
{
  return "s" + std::to_string(bunch_size) + "_b" + std::to_string(split.high_bits) + std::to_string(split.low_bits);
}

ModelConfig ModelConfig::from_name(const std::string& name)
{
  // s<S>_b<Bh><Bl>, one digit each.
  const bool shaped = name.size() == 6 && name[0] == 's' && name.compare(2, 2, "_b") == 0 &&
                      std::isdigit(static_cast<unsigned char>(name[1])) && std::isdigit(static_cast<unsigned char>(name[4])) &&
                      std::isdigit(static_cast<unsigned char>(name[5]));
  if (!shaped)
    throw Error(Errc::config_invalid, "config name '" + name + "' is not of the form s<S>_b<Bh><Bl>, e.g. s4_b74");
  ModelConfig cfg = for_mode(name[1] - '0', {name[4] - '0', name[5] - '0'});
  cfg.validate();
  return cfg;
}

} // namespace blpc
