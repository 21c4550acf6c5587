#pragma once

#include <array>
#include <span>
#include <vector>

namespace blpc
{

constexpr int kNumBands = 20;
constexpr int kFeatureDim = kNumBands + 2;
constexpr int kLpcOrder = 16;

/// Analysis window of the feature front-end (20 ms at 24 kHz); spectrum bins are 50 Hz apart.
constexpr int kAnalysisWindow = 480;
constexpr int kSpectrumBins = kAnalysisWindow / 2 + 1;

/// Triangular Bark-like bands over 0-12 kHz at 24 kHz sampling. Each entry is
/// the centre bin of one band (bin = Hz / 50):
///   0 150 300 450 600 800 1000 1200 1400 1600 2000 2400 2800 3200 3800
///   4600 5600 7000 9000 12000 Hz
/// Neighbouring bands overlap linearly between consecutive centres.
constexpr std::array<int, kNumBands> kBandCenterBins = {0,  3,  6,  9,  12, 16,  20,  24,  28,  32,
                                                        40, 48, 56, 64, 76, 92, 112, 140, 180, 240};

/// Lag window w[k] = C(2L, L+k) / C(2L, L), a binomial approximation of a
/// Gaussian lag window (about 60 Hz bandwidth at 24 kHz).
constexpr double kLagWindowOrder = 16000.0;
/// r[0] is multiplied by (1 + kNoiseFloor) before the recursion (-50 dB white noise floor).
constexpr double kNoiseFloor = 1e-5;
/// Cepstra hold DCT(log10(band_energy + kLogEnergyFloor)).
constexpr double kLogEnergyFloor = 1e-2;
/// Reconstructed log10 band energies are clamped to +-kMaxLogEnergy.
constexpr double kMaxLogEnergy = 20.0;

/// One frame of conditioning features: 20 Bark cepstra plus pitch period (in
/// samples at 24 kHz) and pitch correlation.
struct FeatureFrame
{
  std::array<float, kNumBands> cepstrum{};
  float pitch_period = 100.0f;
  float pitch_correlation = 0.0f;

  /// Throws Error(invalid_input) on non-finite values or pitch_period <= 0.
  void validate() const;

  /// Layout used on disk and as network input: cepstrum[0..19], period, correlation.
  std::array<float, kFeatureDim> values() const;
  static FeatureFrame from_values(std::span<const float> values);
};

/// Predictor coefficients a_1..a_M, prediction p_t = sum a_i * s_{t-i}.
struct LpcCoeffs
{
  std::array<float, kLpcOrder> a{};
};

struct LevinsonResult
{
  /// a_1..a_M in predictor sign convention.
  std::vector<double> coeffs;
  /// k_1..k_M.
  std::vector<double> reflection;
  /// Prediction error power after each order, error_power[0] = r[0].
  std::vector<double> error_power;
};

/// Solves the Toeplitz normal equations for order r.size() - 1.
/// Throws Error(degenerate_input) if r[0] <= 0 or the matrix is not positive definite.
LevinsonResult levinson_durbin(std::span<const double> r);

/// Step-down recursion: predictor coefficients back to reflection coefficients.
std::vector<double> lpc_to_reflection(std::span<const double> coeffs);

/// Inverse DCT of the cepstrum: log10 band energies (clamped to +-kMaxLogEnergy).
std::array<double, kNumBands> cepstrum_to_log_bands(std::span<const float, kNumBands> cepstrum);

/// Linear interpolation of band energies onto the 241-bin power spectrum.
std::array<double, kSpectrumBins> bands_to_spectrum(std::span<const double, kNumBands> band_energy);

/// First `lags` autocorrelation values of a one-sided real power spectrum,
/// i.e. the inverse DFT of its symmetric 480-point extension.
std::vector<double> spectrum_to_autocorrelation(std::span<const double, kSpectrumBins> power, int lags);

/// Full derivation: cepstrum -> band energies -> spectrum -> autocorrelation
/// -> lag window and noise floor -> Levinson-Durbin.
LevinsonResult cepstrum_to_lpc_detailed(const FeatureFrame& frame);
LpcCoeffs cepstrum_to_lpc(const FeatureFrame& frame);

/// history holds the last M samples, most recent last.
float predict(std::span<const float> history, const LpcCoeffs& coeffs) noexcept;

} // namespace blpc
