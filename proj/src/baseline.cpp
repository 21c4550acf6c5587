#include "blpc/baseline.hpp"

#include <algorithm>

#include "blpc/error.hpp"

namespace blpc
{

BaselineVocoder::BaselineVocoder(const Model& model)
: model_(&model)
{
  const auto& c = model.config;
  if (c.bunch_size != 1 || c.split.bunched())
    throw Error(Errc::config_invalid, "baseline vocoder needs S=1 and an unsplit code, got " + c.name());
  cond_a_.resize(static_cast<std::size_t>(3 * c.gru_a_units));
  x_a_.resize(cond_a_.size());
  g_a_.resize(cond_a_.size());
  cond_b_.resize(static_cast<std::size_t>(3 * c.gru_b_units));
  x_b_.resize(cond_b_.size());
  g_b_.resize(cond_b_.size());
  logits_.resize(static_cast<std::size_t>(c.full_codes()));
  scratch_.resize(2 * logits_.size());
  probs_.resize(logits_.size());
}

BaselineVocoder::State BaselineVocoder::init(std::uint64_t seed) const
{
  const auto& c = model_->config;
  State s;
  s.gru_a.assign(static_cast<std::size_t>(c.gru_a_units), 0.0f);
  s.gru_b.assign(static_cast<std::size_t>(c.gru_b_units), 0.0f);
  s.last_excitation = c.mu_spec().zero_code();
  s.history.assign(static_cast<std::size_t>(c.lpc_order), 0.0f);
  s.rng = Rng(seed);
  return s;
}

void BaselineVocoder::set_frame(std::span<const float> conditioning)
{
  const Model& m = *model_;
  std::copy(m.gru_a_input_bias.begin(), m.gru_a_input_bias.end(), cond_a_.begin());
  m.gru_a_cond.matvec_accumulate(conditioning, cond_a_);
  std::copy(m.gru_b_input_bias.begin(), m.gru_b_input_bias.end(), cond_b_.begin());
  m.gru_b_input.matvec_accumulate_columns(m.config.gru_a_units, conditioning, cond_b_);
}

std::int16_t BaselineVocoder::next_sample(State& st, const LpcCoeffs& lpc, float temperature)
{
  const Model& m = *model_;
  // Embedded previous sample, current prediction and previous excitation.
  std::copy(cond_a_.begin(), cond_a_.end(), x_a_.begin());
  add_row(m.gru_a_tables[0].row(m.input_index(m.codec.encode(static_cast<int>(st.last_sample)))), x_a_);
  add_row(m.gru_a_tables[1].row(m.input_index(m.codec.encode(clamp16(st.prediction)))), x_a_);
  add_row(m.gru_a_tables[2].row(m.input_index(st.last_excitation)), x_a_);
  gru_step(st.gru_a, m.gru_a_recurrent, x_a_, m.gru_a_recurrent_bias, g_a_);

  std::copy(cond_b_.begin(), cond_b_.end(), x_b_.begin());
  m.gru_b_input.matvec_accumulate_columns(0, st.gru_a, x_b_);
  gru_step(st.gru_b, m.gru_b_recurrent, x_b_, m.gru_b_recurrent_bias, g_b_);

  m.heads_high[0].forward(st.gru_b, logits_, scratch_);
  const int excitation = softmax_sample(logits_, st.rng, temperature, probs_);
  const int sample = clamp16(st.prediction + static_cast<float>(m.codec.decode(excitation)));

  std::copy(st.history.begin() + 1, st.history.end(), st.history.begin());
  st.history.back() = static_cast<float>(sample);
  st.prediction = predict(st.history, lpc);
  st.last_sample = static_cast<float>(sample);
  st.last_excitation = excitation;
  return static_cast<std::int16_t>(sample);
}

std::vector<std::int16_t> BaselineVocoder::synthesize(std::span<const FeatureFrame> frames, std::uint64_t seed,
                                                      float temperature)
{
  const auto& c = model_->config;
  const auto conditioning = model_->frn.forward(frames);
  const auto f = static_cast<std::size_t>(c.frn_dim);
  State st = init(seed);
  std::vector<std::int16_t> pcm;
  pcm.reserve(frames.size() * static_cast<std::size_t>(c.frame_size));
  for (std::size_t t = 0; t < frames.size(); ++t)
  {
    const LpcCoeffs lpc = cepstrum_to_lpc(frames[t]);
    set_frame(std::span<const float>(conditioning).subspan(t * f, f));
    for (int n = 0; n < c.frame_size; ++n)
      pcm.push_back(next_sample(st, lpc, temperature));
  }
  last_draws_ = st.rng.draws();
  return pcm;
}

} // namespace blpc
