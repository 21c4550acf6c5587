#include "blpc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blpc/error.hpp"

namespace blpc
{

MuLawSpec::MuLawSpec(int bits, double slope)
: bits_(bits)
, slope_(slope)
{
  if (bits < 8 || bits > 16)
    throw Error(Errc::invalid_input, "mu-law bits must be in [8, 16], got " + std::to_string(bits));
  if (!(slope > 0.0 && slope <= 1.0))
    throw Error(Errc::invalid_input, "mu-law slope factor must be in (0, 1], got " + std::to_string(slope));
  v_m_ = slope * std::ldexp(1.0, bits);
  v_m2_ = std::ldexp(1.0, bits - 1);
  if (v_m_ <= 2.0)
    throw Error(Errc::invalid_input, "mu-law slope factor too small for " + std::to_string(bits) + " bits");
  log_v_m_ = std::log(v_m_);
  s1_ = (v_m_ - 1.0) / 32768.0;
  s2_ = 32768.0 / (v_m_ - 1.0);
}

int clamp16(double x) noexcept
{
  // std::round is half-away-from-zero.
  const double r = std::round(x);
  return static_cast<int>(std::clamp(r, double(kPcmMin), double(kPcmMax)));
}

int encode(int x, const MuLawSpec& spec) noexcept
{
  x = std::clamp(x, kPcmMin, kPcmMax);
  const double mag = std::abs(static_cast<double>(x));
  double y = spec.v_m2_ * std::log1p(spec.s1_ * mag) / spec.log_v_m_;
  if (x < 0)
    y = -y;
  const int code = static_cast<int>(std::round(y + spec.v_m2_));
  return std::clamp(code, 0, spec.num_codes() - 1);
}

int decode(int y, const MuLawSpec& spec)
{
  if (y < 0 || y >= spec.num_codes())
    throw Error(Errc::invalid_input,
                "mu-law code " + std::to_string(y) + " outside [0, " + std::to_string(spec.num_codes()) + ")");
  const double u = static_cast<double>(y) - spec.v_m2_;
  double x = spec.s2_ * std::expm1(spec.log_v_m_ * std::abs(u) / spec.v_m2_);
  if (u < 0)
    x = -x;
  return clamp16(x);
}

CodecAudit audit_codec(const MuLawSpec& spec)
{
  CodecAudit audit;
  audit.codes_checked = spec.num_codes();
  audit.min_pcm_step = kPcmMax - kPcmMin;
  int prev = 0;
  for (int y = 0; y < spec.num_codes(); ++y)
  {
    const int x = decode(y, spec);
    if (encode(x, spec) != y)
      audit.collapsed_codes.push_back(y);
    if (y > 0)
      audit.min_pcm_step = std::min(audit.min_pcm_step, x - prev);
    prev = x;
  }
  audit.step_at_zero = encode(1, spec) - encode(0, spec);
  return audit;
}

void BitSplit::validate() const
{
  if (high_bits < 1 || low_bits < 0)
    throw Error(Errc::invalid_input, "bit split needs high_bits >= 1 and low_bits >= 0, got (" +
                                       std::to_string(high_bits) + "," + std::to_string(low_bits) + ")");
}

std::pair<int, int> split_code(int code, const BitSplit& split)
{
  return {code >> split.low_bits, code & ((1 << split.low_bits) - 1)};
}

int recombine(int high, int low, const BitSplit& split)
{
  if (high < 0 || high >= (1 << split.high_bits) || low < 0 || low >= (1 << split.low_bits))
    throw Error(Errc::invalid_input, "bit bunch (" + std::to_string(high) + "," + std::to_string(low) +
                                       ") outside split (" + std::to_string(split.high_bits) + "," +
                                       std::to_string(split.low_bits) + ")");
  return (high << split.low_bits) + low;
}

MuLawTable::MuLawTable(const MuLawSpec& spec)
: spec_(spec)
, encode_(static_cast<std::size_t>(kPcmMax - kPcmMin + 1))
, decode_(static_cast<std::size_t>(spec.num_codes()))
{
  for (int x = kPcmMin; x <= kPcmMax; ++x)
    encode_[static_cast<std::size_t>(x - kPcmMin)] = static_cast<std::uint16_t>(blpc::encode(x, spec));
  for (int y = 0; y < spec.num_codes(); ++y)
    decode_[static_cast<std::size_t>(y)] = blpc::decode(y, spec);
}

int MuLawTable::encode(int x) const noexcept
{
  x = std::clamp(x, kPcmMin, kPcmMax);
  return encode_[static_cast<std::size_t>(x - kPcmMin)];
}

} // namespace blpc
