#include "blpc/synth.hpp"

#include "blpc/error.hpp"

namespace blpc
{

Synthesizer::Synthesizer(const Model& model)
: model_(&model)
, srn_(model)
, state_(init_state(model.config, 0))
{
}

void Synthesizer::reserve(std::size_t frames)
{
  frn_ws_.reserve(frames, model_->config.frn_dim);
  conditioning_.reserve(frames * static_cast<std::size_t>(model_->config.frn_dim));
}

SynthStats Synthesizer::run_into(std::span<const FeatureFrame> frames, std::uint64_t seed, float temperature,
                                 std::span<std::int16_t> out)
{
  const ModelConfig& cfg = model_->config;
  const auto n = static_cast<std::size_t>(cfg.frame_size);
  const auto f = static_cast<std::size_t>(cfg.frn_dim);
  if (out.size() != frames.size() * n)
    throw Error(Errc::invalid_input, "output buffer must hold frames * frame_size samples");

  conditioning_.resize(frames.size() * f);
  model_->frn.forward(frames, conditioning_, frn_ws_);

  // Re-seed in place; the state vectors keep their capacity.
  std::fill(state_.gru_a.begin(), state_.gru_a.end(), 0.0f);
  std::fill(state_.gru_b.begin(), state_.gru_b.end(), 0.0f);
  std::fill(state_.last_samples.begin(), state_.last_samples.end(), 0.0f);
  std::fill(state_.last_excitations.begin(), state_.last_excitations.end(), model_->codec.spec().zero_code());
  std::fill(state_.last_predictions.begin(), state_.last_predictions.end(), 0.0f);
  std::fill(state_.history.begin(), state_.history.end(), 0.0f);
  state_.rng = Rng(seed);

  stats_ = {};
  std::size_t pos = 0;
  for (std::size_t t = 0; t < frames.size(); ++t)
  {
    const LpcCoeffs lpc = cepstrum_to_lpc(frames[t]);
    srn_.set_frame(std::span<const float>(conditioning_).subspan(t * f, f));
    for (int step = 0; step < cfg.steps_per_frame(); ++step)
    {
      const BunchOutput bunch = srn_.step(state_, lpc, temperature);
      for (int i = 0; i < bunch.count; ++i)
        out[pos++] = bunch.samples[static_cast<std::size_t>(i)];
      ++stats_.network_steps;
    }
  }
  stats_.frames = frames.size();
  stats_.samples = pos;
  stats_.rng_draws = state_.rng.draws();
  return stats_;
}

std::vector<std::int16_t> Synthesizer::run(std::span<const FeatureFrame> frames, std::uint64_t seed, float temperature)
{
  std::vector<std::int16_t> out(frames.size() * static_cast<std::size_t>(model_->config.frame_size));
  run_into(frames, seed, temperature, out);
  return out;
}

std::vector<std::int16_t> synthesize(std::span<const FeatureFrame> frames, const Model& model, std::uint64_t seed,
                                     float temperature)
{
  Synthesizer synth(model);
  return synth.run(frames, seed, temperature);
}

} // namespace blpc
