#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace blpc
{

constexpr int kPcmMin = -32768;
constexpr int kPcmMax = 32767;

/// Scaled mu-law quantizer between 16-bit linear PCM and B-bit codes.
///
/// The slope factor only scales the companding base (V_m = w_s * 2^B) used in
/// s1, s2 and the logarithms. The output midpoint stays at 2^(B-1), so codes
/// always cover [0, 2^B) and code 2^(B-1) is silence.
class MuLawSpec
{
public:
  /// Throws Error(invalid_input) unless 8 <= bits <= 16, 0 < slope <= 1 and
  /// the scaled base stays above 1.
  MuLawSpec(int bits, double slope);

  /// Classic 8-bit mu-law.
  static MuLawSpec standard8() { return MuLawSpec(8, 1.0); }

  int bits() const noexcept { return bits_; }
  double slope() const noexcept { return slope_; }
  int num_codes() const noexcept { return 1 << bits_; }
  int zero_code() const noexcept { return 1 << (bits_ - 1); }

  double base() const noexcept { return v_m_; }
  double half_range() const noexcept { return v_m2_; }

  bool operator==(const MuLawSpec&) const = default;

private:
  int bits_;
  double slope_;
  double v_m_;
  double v_m2_;
  double log_v_m_;
  double s1_;
  double s2_;

  friend int encode(int, const MuLawSpec&) noexcept;
  friend int decode(int, const MuLawSpec&);
};

/// Linear PCM -> code. Inputs outside the 16-bit range are clamped first.
int encode(int x, const MuLawSpec& spec) noexcept;

/// Code -> linear PCM. Throws Error(invalid_input) for codes outside [0, 2^B).
int decode(int y, const MuLawSpec& spec);

/// Rounds half away from zero and clamps into [-32768, 32767].
int clamp16(double x) noexcept;

/// Result of the exhaustive round-trip audit behind `verify-codec`.
struct CodecAudit
{
  int codes_checked = 0;
  /// Codes y with encode(decode(y)) != y.
  std::vector<int> collapsed_codes;
  /// Smallest PCM step between consecutive codes: min over y of decode(y+1) - decode(y).
  int min_pcm_step = 0;
  /// encode(1) - encode(0), informational (0 for classic 8-bit mu-law).
  int step_at_zero = 0;

  /// Every code decodes to its own PCM value: steps of at least one PCM unit.
  bool passed() const noexcept { return collapsed_codes.empty() && min_pcm_step >= 1; }
};

CodecAudit audit_codec(const MuLawSpec& spec);

/// Split of a B-bit code into a high and a low bunch.
struct BitSplit
{
  int high_bits = 8;
  int low_bits = 0;

  /// Throws Error(invalid_input) unless high_bits >= 1 and low_bits >= 0.
  void validate() const;
  int total_bits() const noexcept { return high_bits + low_bits; }
  bool bunched() const noexcept { return low_bits > 0; }
  bool operator==(const BitSplit&) const = default;
};

/// e -> (e_h, e_l) with e_h = e >> B_l and e_l = e mod 2^B_l.
std::pair<int, int> split_code(int code, const BitSplit& split);

/// (e_h, e_l) -> 2^B_l * e_h + e_l. Throws Error(invalid_input) on range violations.
int recombine(int high, int low, const BitSplit& split);

/// Precomputed encode/decode tables for the sample loop. Entries are produced
/// by `encode`/`decode`, so lookups are exactly equal to the pure functions.
class MuLawTable
{
public:
  explicit MuLawTable(const MuLawSpec& spec);

  const MuLawSpec& spec() const noexcept { return spec_; }
  int encode(int x) const noexcept;
  int decode(int y) const noexcept { return decode_[static_cast<std::size_t>(y)]; }

private:
  MuLawSpec spec_;
  std::vector<std::uint16_t> encode_;
  std::vector<std::int32_t> decode_;
};

} // namespace blpc
