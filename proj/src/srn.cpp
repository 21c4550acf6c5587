#include "blpc/srn.hpp"

#include <algorithm>

#include "blpc/error.hpp"

namespace blpc
{

SrnState init_state(const ModelConfig& config, std::uint64_t seed)
{
  config.validate();
  const auto s = static_cast<std::size_t>(config.bunch_size);
  SrnState st;
  st.gru_a.assign(static_cast<std::size_t>(config.gru_a_units), 0.0f);
  st.gru_b.assign(static_cast<std::size_t>(config.gru_b_units), 0.0f);
  st.last_samples.assign(s, 0.0f);
  st.last_excitations.assign(s, config.mu_spec().zero_code());
  st.last_predictions.assign(s, 0.0f);
  st.history.assign(static_cast<std::size_t>(config.lpc_order), 0.0f);
  st.rng = Rng(seed);
  st.initialized = true;
  return st;
}

void check_state(const SrnState& state, const ModelConfig& config)
{
  if (!state.initialized) [[unlikely]]
    throw Error(Errc::invalid_input, "sample-rate network state is not initialized");
  const auto s = static_cast<std::size_t>(config.bunch_size);
  if (state.gru_a.size() != static_cast<std::size_t>(config.gru_a_units) ||
      state.gru_b.size() != static_cast<std::size_t>(config.gru_b_units) || state.last_samples.size() != s ||
      state.last_excitations.size() != s || state.last_predictions.size() != s ||
      state.history.size() != static_cast<std::size_t>(config.lpc_order)) [[unlikely]]
    throw Error(Errc::invalid_input, "sample-rate network state does not match config " + config.name());
}

SampleRateNetwork::SampleRateNetwork(const Model& model)
: model_(&model)
{
  const auto& c = model.config;
  const auto a3 = static_cast<std::size_t>(3 * c.gru_a_units);
  const auto b = static_cast<std::size_t>(c.gru_b_units);
  const auto kh = static_cast<std::size_t>(c.high_codes());
  const auto kl = static_cast<std::size_t>(c.low_codes());
  cond_a_.assign(a3, 0.0f);
  cond_b_.assign(3 * b, 0.0f);
  x_a_.assign(a3, 0.0f);
  g_a_.assign(a3, 0.0f);
  x_b_.assign(3 * b, 0.0f);
  g_b_.assign(3 * b, 0.0f);
  gru_b_out_.assign(b, 0.0f);
  c_high_.assign(b, 0.0f);
  c_low_.assign(b, 0.0f);
  c_before_.assign(b, 0.0f);
  logits_high_.assign(kh, 0.0f);
  logits_low_.assign(kl, 0.0f);
  head_scratch_.assign(2 * std::max(kh, kl), 0.0f);
  probs_.assign(std::max(kh, kl), 0.0f);
}

void SampleRateNetwork::set_frame(std::span<const float> conditioning)
{
  const Model& m = *model_;
  if (conditioning.size() != static_cast<std::size_t>(m.config.frn_dim)) [[unlikely]]
    throw Error(Errc::invalid_input, "frame conditioning has " + std::to_string(conditioning.size()) + " values, expected " +
                                       std::to_string(m.config.frn_dim));
  std::copy(m.gru_a_input_bias.begin(), m.gru_a_input_bias.end(), cond_a_.begin());
  m.gru_a_cond.matvec_accumulate(conditioning, cond_a_);
  std::copy(m.gru_b_input_bias.begin(), m.gru_b_input_bias.end(), cond_b_.begin());
  m.gru_b_input.matvec_accumulate_columns(m.config.gru_a_units, conditioning, cond_b_);
  frame_set_ = true;
}

BunchOutput SampleRateNetwork::step(SrnState& state, const LpcCoeffs& lpc, float temperature, StepObserver* observer)
{
  const Model& m = *model_;
  const ModelConfig& cfg = m.config;
  check_state(state, cfg);
  if (!frame_set_) [[unlikely]]
    throw Error(Errc::invalid_input, "no frame conditioning set before the network step");
  const int s = cfg.bunch_size;
  const bool bunched = cfg.split.bunched();

  // GRU_A input: frame part plus one lookup row per input signal.
  std::copy(cond_a_.begin(), cond_a_.end(), x_a_.begin());
  for (int i = 0; i < s; ++i)
  {
    const int code = m.codec.encode(static_cast<int>(state.last_samples[static_cast<std::size_t>(i)]));
    add_row(m.gru_a_tables[static_cast<std::size_t>(i)].row(m.input_index(code)), x_a_);
  }
  for (int i = 0; i < s; ++i)
  {
    const int code = m.codec.encode(clamp16(state.last_predictions[static_cast<std::size_t>(i)]));
    add_row(m.gru_a_tables[static_cast<std::size_t>(s + i)].row(m.input_index(code)), x_a_);
  }
  for (int i = 0; i < s; ++i)
  {
    const int code = state.last_excitations[static_cast<std::size_t>(i)];
    add_row(m.gru_a_tables[static_cast<std::size_t>(2 * s + i)].row(m.input_index(code)), x_a_);
  }
  gru_step(state.gru_a, m.gru_a_recurrent, x_a_, m.gru_a_recurrent_bias, g_a_);

  std::copy(cond_b_.begin(), cond_b_.end(), x_b_.begin());
  m.gru_b_input.matvec_accumulate_columns(0, state.gru_a, x_b_);
  gru_step(state.gru_b, m.gru_b_recurrent, x_b_, m.gru_b_recurrent_bias, g_b_);
  std::copy(state.gru_b.begin(), state.gru_b.end(), gru_b_out_.begin());

  // Excitation loop: one head (or head pair) per bunch position.
  BunchOutput out;
  out.count = s;
  std::copy(state.gru_b.begin(), state.gru_b.end(), c_high_.begin());
  for (int i = 0; i < s; ++i)
  {
    const auto pos = static_cast<std::size_t>(i);
    m.heads_high[pos].forward(c_high_, logits_high_, head_scratch_);
    const int high = softmax_sample(logits_high_, state.rng, temperature, probs_);
    int low = 0;
    if (bunched)
    {
      const auto emb = m.context_high.row(high);
      for (std::size_t j = 0; j < c_low_.size(); ++j)
        c_low_[j] = c_high_[j] + emb[j];
      m.heads_low[pos].forward(c_low_, logits_low_, head_scratch_);
      low = softmax_sample(logits_low_, state.rng, temperature, probs_);
    }
    const int code = (high << cfg.split.low_bits) + low;
    out.high_codes[pos] = high;
    out.low_codes[pos] = low;
    out.excitation_codes[pos] = code;
    if (observer)
      std::copy(c_high_.begin(), c_high_.end(), c_before_.begin());
    add_row(m.context_full.row(code), c_high_);
    if (observer)
      observer->on_excitation(i, c_before_, code, c_high_);
  }

  // Reconstruction loop: s_{t+i} = e_{t+i} + p_{t+i}, then predict p_{t+i+1}.
  const std::size_t order = state.history.size();
  float prediction = state.last_predictions[static_cast<std::size_t>(s - 1)];
  for (int i = 0; i < s; ++i)
  {
    const auto pos = static_cast<std::size_t>(i);
    const int sample = clamp16(prediction + static_cast<float>(m.codec.decode(out.excitation_codes[pos])));
    out.samples[pos] = static_cast<std::int16_t>(sample);
    out.predictions[pos] = prediction;
    std::copy(state.history.begin() + 1, state.history.end(), state.history.begin());
    state.history[order - 1] = static_cast<float>(sample);
    prediction = predict(state.history, lpc);
    state.last_predictions[pos] = prediction;
  }
  for (int i = 0; i < s; ++i)
  {
    const auto pos = static_cast<std::size_t>(i);
    state.last_samples[pos] = static_cast<float>(out.samples[pos]);
    state.last_excitations[pos] = out.excitation_codes[pos];
  }
  ++steps_;
  return out;
}

BunchOutput srn_step(const Model& model, SrnState& state, std::span<const float> conditioning, const LpcCoeffs& lpc,
                     float temperature)
{
  SampleRateNetwork net(model);
  net.set_frame(conditioning);
  return net.step(state, lpc, temperature);
}

} // namespace blpc
