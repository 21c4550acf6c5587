#include "features.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace blpc::test
{

std::vector<double> ar_process(std::span<const double> coeffs, std::size_t length, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t burn = 4096;
  std::vector<double> x(length + burn, 0.0);
  for (std::size_t n = 0; n < x.size(); ++n)
  {
    double v = noise(gen);
    for (std::size_t i = 0; i < coeffs.size() && i < n; ++i)
      v += coeffs[i] * x[n - 1 - i];
    x[n] = v;
  }
  return {x.begin() + burn, x.end()};
}

std::vector<double> power_spectrum(std::span<const double> segment)
{
  const std::size_t n = kAnalysisWindow;
  std::vector<double> power(kSpectrumBins);
  for (std::size_t k = 0; k < power.size(); ++k)
  {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t t = 0; t < n; ++t)
    {
      const double w = std::pow(std::sin(std::numbers::pi * (t + 0.5) / n), 2);
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(k * t % n) / n;
      re += w * segment[t] * std::cos(phase);
      im -= w * segment[t] * std::sin(phase);
    }
    power[k] = re * re + im * im;
  }
  return power;
}

std::vector<double> band_energies(std::span<const double> power)
{
  std::vector<double> num(kNumBands, 0.0);
  std::vector<double> den(kNumBands, 0.0);
  for (int b = 0; b + 1 < kNumBands; ++b)
  {
    const int lo = kBandCenterBins[static_cast<std::size_t>(b)];
    const int hi = kBandCenterBins[static_cast<std::size_t>(b) + 1];
    for (int j = lo; j < hi; ++j)
    {
      const double frac = static_cast<double>(j - lo) / (hi - lo);
      num[static_cast<std::size_t>(b)] += (1.0 - frac) * power[static_cast<std::size_t>(j)];
      den[static_cast<std::size_t>(b)] += 1.0 - frac;
      num[static_cast<std::size_t>(b) + 1] += frac * power[static_cast<std::size_t>(j)];
      den[static_cast<std::size_t>(b) + 1] += frac;
    }
  }
  num.back() += power[kSpectrumBins - 1];
  den.back() += 1.0;
  for (int b = 0; b < kNumBands; ++b)
    num[static_cast<std::size_t>(b)] /= den[static_cast<std::size_t>(b)];
  return num;
}

FeatureFrame extract_frame(std::span<const double> signal)
{
  std::vector<double> energy(kNumBands, 0.0);
  int frames = 0;
  for (std::size_t start = 0; start + kAnalysisWindow <= signal.size(); start += kAnalysisWindow / 2)
  {
    const auto bands = band_energies(power_spectrum(signal.subspan(start, kAnalysisWindow)));
    for (int b = 0; b < kNumBands; ++b)
      energy[static_cast<std::size_t>(b)] += bands[static_cast<std::size_t>(b)];
    ++frames;
  }
  FeatureFrame frame;
  for (int k = 0; k < kNumBands; ++k)
  {
    double acc = 0.0;
    for (int n = 0; n < kNumBands; ++n)
      acc += std::log10(energy[static_cast<std::size_t>(n)] / frames + kLogEnergyFloor) *
             std::cos(std::numbers::pi * (n + 0.5) * k / kNumBands);
    frame.cepstrum[static_cast<std::size_t>(k)] = static_cast<float>(acc * std::sqrt((k == 0 ? 1.0 : 2.0) / kNumBands));
  }
  return frame;
}

std::vector<double> random_stable_ar16(std::mt19937_64& gen)
{
  std::uniform_real_distribution<double> radius(0.2, 0.9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> poly{1.0};
  for (int p = 0; p < 8; ++p)
  {
    const double r = radius(gen);
    const double w = std::numbers::pi * (p + unit(gen)) / 8.0;
    const double f[3] = {1.0, -2.0 * r * std::cos(w), r * r};
    std::vector<double> next(poly.size() + 2, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j)
        next[i + j] += poly[i] * f[j];
    poly = next;
  }
  std::vector<double> a(16);
  for (std::size_t i = 0; i < 16; ++i)
    a[i] = -poly[i + 1];
  return a;
}

std::vector<double> ar_autocorrelation(std::span<const double> a, std::size_t lags)
{
  const std::size_t len = 20000;
  std::vector<double> h(len, 0.0);
  for (std::size_t n = 0; n < len; ++n)
  {
    double v = n == 0 ? 1.0 : 0.0;
    for (std::size_t i = 0; i < a.size() && i < n; ++i)
      v += a[i] * h[n - 1 - i];
    h[n] = v;
  }
  std::vector<double> r(lags, 0.0);
  for (std::size_t k = 0; k < lags; ++k)
    for (std::size_t n = 0; n + k < len; ++n)
      r[k] += h[n] * h[n + k];
  return r;
}

std::vector<double> random_pd_autocorrelation(std::mt19937_64& gen)
{
  std::uniform_real_distribution<double> log_power(-4.0, 4.0);
  std::array<double, kSpectrumBins> power{};
  for (double& p : power)
    p = std::pow(10.0, log_power(gen));
  return spectrum_to_autocorrelation(power, kLpcOrder + 1);
}

} // namespace blpc::test
