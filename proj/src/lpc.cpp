#include "blpc/lpc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "blpc/error.hpp"

namespace blpc
{

void FeatureFrame::validate() const
{
  for (int i = 0; i < kNumBands; ++i)
    if (!std::isfinite(cepstrum[static_cast<std::size_t>(i)]))
      throw Error(Errc::invalid_input, "non-finite cepstral coefficient " + std::to_string(i));
  if (!std::isfinite(pitch_period) || !std::isfinite(pitch_correlation))
    throw Error(Errc::invalid_input, "non-finite pitch feature");
  if (pitch_period <= 0.0f)
    throw Error(Errc::invalid_input, "pitch period must be positive, got " + std::to_string(pitch_period));
}

std::array<float, kFeatureDim> FeatureFrame::values() const
{
  std::array<float, kFeatureDim> v{};
  std::copy(cepstrum.begin(), cepstrum.end(), v.begin());
  v[kNumBands] = pitch_period;
  v[kNumBands + 1] = pitch_correlation;
  return v;
}

FeatureFrame FeatureFrame::from_values(std::span<const float> values)
{
  if (values.size() != kFeatureDim)
    throw Error(Errc::invalid_input,
                "feature frame needs " + std::to_string(kFeatureDim) + " values, got " + std::to_string(values.size()));
  FeatureFrame frame;
  std::copy_n(values.begin(), kNumBands, frame.cepstrum.begin());
  frame.pitch_period = values[kNumBands];
  frame.pitch_correlation = values[kNumBands + 1];
  return frame;
}

namespace
{

// In-place recursion; coeffs, reflection and error_power are caller-sized
// (M, M, M+1). No allocation, so it can run inside the synthesis loop.
void levinson_into(std::span<const double> r, std::span<double> coeffs, std::span<double> reflection,
                   std::span<double> error_power)
{
  if (r.empty() || !(r[0] > 0.0))
    throw Error(Errc::degenerate_input, "autocorrelation r[0] must be positive");
  const std::size_t order = r.size() - 1;
  std::fill(coeffs.begin(), coeffs.end(), 0.0);
  error_power[0] = r[0];
  double err = r[0];
  for (std::size_t m = 0; m < order; ++m)
  {
    double acc = r[m + 1];
    for (std::size_t j = 0; j < m; ++j)
      acc -= coeffs[j] * r[m - j];
    const double k = acc / err;
    if (!(std::abs(k) < 1.0))
      throw Error(Errc::degenerate_input, "autocorrelation is not positive definite at order " + std::to_string(m + 1));
    for (std::size_t lo = 0, hi = m; lo < hi--; ++lo)
    {
      const double a_lo = coeffs[lo];
      const double a_hi = coeffs[hi];
      coeffs[lo] = a_lo - k * a_hi;
      if (lo != hi)
        coeffs[hi] = a_hi - k * a_lo;
    }
    coeffs[m] = k;
    reflection[m] = k;
    err *= 1.0 - k * k;
    error_power[m + 1] = err;
  }
}

} // namespace

LevinsonResult levinson_durbin(std::span<const double> r)
{
  if (r.empty())
    throw Error(Errc::degenerate_input, "empty autocorrelation");
  const std::size_t order = r.size() - 1;
  LevinsonResult out;
  out.coeffs.assign(order, 0.0);
  out.reflection.assign(order, 0.0);
  out.error_power.assign(order + 1, 0.0);
  levinson_into(r, out.coeffs, out.reflection, out.error_power);
  return out;
}

std::vector<double> lpc_to_reflection(std::span<const double> coeffs)
{
  std::vector<double> a(coeffs.begin(), coeffs.end());
  std::vector<double> k(a.size(), 0.0);
  std::vector<double> lower(a.size(), 0.0);
  for (std::size_t m = a.size(); m-- > 0;)
  {
    k[m] = a[m];
    const double denom = 1.0 - k[m] * k[m];
    if (denom <= 0.0)
    {
      // Unstable filter; the remaining lower-order values are meaningless.
      for (std::size_t j = 0; j < m; ++j)
        k[j] = 1.0;
      break;
    }
    for (std::size_t j = 0; j < m; ++j)
      lower[j] = (a[j] + k[m] * a[m - 1 - j]) / denom;
    std::copy_n(lower.begin(), m, a.begin());
  }
  return k;
}

namespace
{

// Orthonormal DCT-III basis (inverse of the orthonormal DCT-II used for analysis).
const std::array<std::array<double, kNumBands>, kNumBands>& dct_basis()
{
  static const auto basis = [] {
    std::array<std::array<double, kNumBands>, kNumBands> b{};
    for (int n = 0; n < kNumBands; ++n)
      for (int k = 0; k < kNumBands; ++k)
      {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / kNumBands);
        b[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
          scale * std::cos(std::numbers::pi * (n + 0.5) * k / kNumBands);
      }
    return b;
  }();
  return basis;
}

const std::array<double, kLpcOrder + 1>& lag_window()
{
  static const auto window = [] {
    std::array<double, kLpcOrder + 1> w{};
    w[0] = 1.0;
    for (int k = 1; k <= kLpcOrder; ++k)
      w[static_cast<std::size_t>(k)] =
        w[static_cast<std::size_t>(k - 1)] * (kLagWindowOrder - k + 1) / (kLagWindowOrder + k);
    return w;
  }();
  return window;
}

} // namespace

std::array<double, kNumBands> cepstrum_to_log_bands(std::span<const float, kNumBands> cepstrum)
{
  const auto& basis = dct_basis();
  std::array<double, kNumBands> log_bands{};
  for (int n = 0; n < kNumBands; ++n)
  {
    double acc = 0.0;
    for (int k = 0; k < kNumBands; ++k)
      acc += basis[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] * cepstrum[static_cast<std::size_t>(k)];
    log_bands[static_cast<std::size_t>(n)] = std::clamp(acc, -kMaxLogEnergy, kMaxLogEnergy);
  }
  return log_bands;
}

std::array<double, kSpectrumBins> bands_to_spectrum(std::span<const double, kNumBands> band_energy)
{
  std::array<double, kSpectrumBins> power{};
  for (int b = 0; b + 1 < kNumBands; ++b)
  {
    const int lo = kBandCenterBins[static_cast<std::size_t>(b)];
    const int hi = kBandCenterBins[static_cast<std::size_t>(b + 1)];
    for (int j = lo; j < hi; ++j)
    {
      const double frac = static_cast<double>(j - lo) / (hi - lo);
      power[static_cast<std::size_t>(j)] =
        (1.0 - frac) * band_energy[static_cast<std::size_t>(b)] + frac * band_energy[static_cast<std::size_t>(b + 1)];
    }
  }
  power[kSpectrumBins - 1] = band_energy[kNumBands - 1];
  return power;
}

namespace
{

constexpr int kMaxLags = kLpcOrder + 1;

// cos(2 pi j k / 480) for the lags the predictor needs.
const std::array<std::array<double, kSpectrumBins>, kMaxLags>& lag_cosines()
{
  static const auto table = [] {
    std::array<std::array<double, kSpectrumBins>, kMaxLags> t{};
    for (int k = 0; k < kMaxLags; ++k)
      for (int j = 0; j < kSpectrumBins; ++j)
        t[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
          std::cos(2.0 * std::numbers::pi * j * k / kAnalysisWindow);
    return t;
  }();
  return table;
}

double autocorrelation_lag(std::span<const double, kSpectrumBins> power, int k)
{
  // Symmetric extension: bins 1..239 appear twice, DC and Nyquist once.
  double acc = power[0] + power[kSpectrumBins - 1] * ((k % 2 == 0) ? 1.0 : -1.0);
  if (k < kMaxLags)
  {
    const auto& c = lag_cosines()[static_cast<std::size_t>(k)];
    for (int j = 1; j < kSpectrumBins - 1; ++j)
      acc += 2.0 * power[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(j)];
  }
  else
  {
    for (int j = 1; j < kSpectrumBins - 1; ++j)
      acc += 2.0 * power[static_cast<std::size_t>(j)] * std::cos(2.0 * std::numbers::pi * j * k / kAnalysisWindow);
  }
  return acc / kAnalysisWindow;
}

} // namespace

std::vector<double> spectrum_to_autocorrelation(std::span<const double, kSpectrumBins> power, int lags)
{
  std::vector<double> r(static_cast<std::size_t>(lags), 0.0);
  for (int k = 0; k < lags; ++k)
    r[static_cast<std::size_t>(k)] = autocorrelation_lag(power, k);
  return r;
}

namespace
{

// Fixed-size pipeline shared by both public entry points.
void analyse(const FeatureFrame& frame, std::array<double, kLpcOrder>& coeffs, std::array<double, kLpcOrder>& reflection,
             std::array<double, kLpcOrder + 1>& error_power)
{
  frame.validate();
  const auto log_bands = cepstrum_to_log_bands(frame.cepstrum);
  std::array<double, kNumBands> energy{};
  for (std::size_t b = 0; b < energy.size(); ++b)
    energy[b] = std::pow(10.0, log_bands[b]);
  const auto power = bands_to_spectrum(energy);
  std::array<double, kLpcOrder + 1> r{};
  const auto& w = lag_window();
  for (int k = 0; k <= kLpcOrder; ++k)
    r[static_cast<std::size_t>(k)] = autocorrelation_lag(power, k) * w[static_cast<std::size_t>(k)];
  r[0] *= 1.0 + kNoiseFloor;
  levinson_into(r, coeffs, reflection, error_power);
}

} // namespace

LevinsonResult cepstrum_to_lpc_detailed(const FeatureFrame& frame)
{
  std::array<double, kLpcOrder> coeffs{};
  std::array<double, kLpcOrder> reflection{};
  std::array<double, kLpcOrder + 1> error_power{};
  analyse(frame, coeffs, reflection, error_power);
  return {{coeffs.begin(), coeffs.end()}, {reflection.begin(), reflection.end()}, {error_power.begin(), error_power.end()}};
}

LpcCoeffs cepstrum_to_lpc(const FeatureFrame& frame)
{
  std::array<double, kLpcOrder> coeffs{};
  std::array<double, kLpcOrder> reflection{};
  std::array<double, kLpcOrder + 1> error_power{};
  analyse(frame, coeffs, reflection, error_power);
  LpcCoeffs out;
  for (std::size_t i = 0; i < out.a.size(); ++i)
    out.a[i] = static_cast<float>(coeffs[i]);
  return out;
}

float predict(std::span<const float> history, const LpcCoeffs& coeffs) noexcept
{
  const std::size_t m = history.size();
  float acc = 0.0f;
  for (std::size_t i = 0; i < coeffs.a.size() && i < m; ++i)
    acc += coeffs.a[i] * history[m - 1 - i];
  return acc;
}

} // namespace blpc
