#include "blpc/model.hpp"

#include <algorithm>

#include "blpc/activations.hpp"
#include "blpc/error.hpp"

namespace blpc
{

namespace
{

DenseMatrix matrix(const WeightStore& store, const std::string& name)
{
  const auto& t = store.tensor(name);
  const int rows = static_cast<int>(t.shape.at(0));
  const int cols = static_cast<int>(t.values.size() / std::max<std::size_t>(1, t.shape.at(0)));
  return DenseMatrix::from_row_major(rows, cols, t.values);
}

FloatBuffer vec(const WeightStore& store, const std::string& name)
{
  const auto& values = store.tensor(name).values;
  return FloatBuffer(values.begin(), values.end());
}

EmbeddingTable embedding(const WeightStore& store, const std::string& name)
{
  const auto& t = store.tensor(name);
  return EmbeddingTable(static_cast<int>(t.shape.at(0)), static_cast<int>(t.shape.at(1)), t.values);
}

} // namespace

std::array<float, kFeatureDim> frame_network_input(const FeatureFrame& frame)
{
  auto x = frame.values();
  x[kNumBands] = (frame.pitch_period - 200.0f) * 0.01f;
  return x;
}

void FrnWorkspace::reserve(std::size_t frames, int dim)
{
  inputs.reserve(frames * kFeatureDim);
  h1.reserve(frames * static_cast<std::size_t>(dim));
  h2.reserve(frames * static_cast<std::size_t>(dim));
  d1.reserve(static_cast<std::size_t>(dim));
}

FrameRateNetwork FrameRateNetwork::from_store(const WeightStore& store)
{
  FrameRateNetwork n;
  n.conv1_ = matrix(store, "frn.conv1.weight");
  n.conv1_bias_ = vec(store, "frn.conv1.bias");
  n.conv2_ = matrix(store, "frn.conv2.weight");
  n.conv2_bias_ = vec(store, "frn.conv2.bias");
  n.dense1_ = matrix(store, "frn.dense1.weight");
  n.dense1_bias_ = vec(store, "frn.dense1.bias");
  n.dense2_ = matrix(store, "frn.dense2.weight");
  n.dense2_bias_ = vec(store, "frn.dense2.bias");
  return n;
}

void FrameRateNetwork::forward(std::span<const FeatureFrame> frames, std::span<float> out, FrnWorkspace& ws) const
{
  const std::size_t t_count = frames.size();
  const std::size_t f = static_cast<std::size_t>(dim());
  if (out.size() != t_count * f)
    throw Error(Errc::invalid_input, "frame network output buffer has the wrong size");

  ws.inputs.resize(t_count * kFeatureDim);
  ws.h1.resize(t_count * f);
  ws.h2.resize(t_count * f);
  ws.d1.resize(f);
  for (std::size_t t = 0; t < t_count; ++t)
  {
    frames[t].validate();
    const auto x = frame_network_input(frames[t]);
    std::copy(x.begin(), x.end(), ws.inputs.begin() + static_cast<std::ptrdiff_t>(t * kFeatureDim));
  }

  // Kernel-3 "same" convolution; taps outside the utterance contribute zero.
  auto conv = [t_count](const DenseMatrix& w, std::span<const float> bias, std::span<const float> in, std::size_t width,
                        std::span<float> result) {
    for (std::size_t t = 0; t < t_count; ++t)
    {
      auto y = result.subspan(t * bias.size(), bias.size());
      std::copy(bias.begin(), bias.end(), y.begin());
      for (int tap = 0; tap < 3; ++tap)
      {
        const auto src = static_cast<std::ptrdiff_t>(t) + tap - 1;
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(t_count))
          continue;
        w.matvec_accumulate_columns(tap * static_cast<int>(width), in.subspan(static_cast<std::size_t>(src) * width, width),
                                    y);
      }
      tanh_inplace(y);
    }
  };
  conv(conv1_, conv1_bias_, ws.inputs, kFeatureDim, ws.h1);
  conv(conv2_, conv2_bias_, ws.h1, f, ws.h2);
  add_row(ws.h1, ws.h2);

  for (std::size_t t = 0; t < t_count; ++t)
  {
    std::copy(dense1_bias_.begin(), dense1_bias_.end(), ws.d1.begin());
    dense1_.matvec_accumulate(std::span<const float>(ws.h2).subspan(t * f, f), ws.d1);
    tanh_inplace(ws.d1);
    auto y = out.subspan(t * f, f);
    std::copy(dense2_bias_.begin(), dense2_bias_.end(), y.begin());
    dense2_.matvec_accumulate(ws.d1, y);
    tanh_inplace(y);
  }
}

std::vector<float> FrameRateNetwork::forward(std::span<const FeatureFrame> frames) const
{
  FrnWorkspace ws;
  std::vector<float> out(frames.size() * static_cast<std::size_t>(dim()));
  forward(frames, out, ws);
  return out;
}

std::vector<float> FrameRateNetwork::forward_at(std::span<const FeatureFrame> frames, std::size_t t) const
{
  if (t >= frames.size())
    throw Error(Errc::invalid_input, "frame index out of range");
  const std::size_t first = t >= 2 ? t - 2 : 0;
  const std::size_t last = std::min(frames.size(), t + 3);
  const auto all = forward(frames.subspan(first, last - first));
  const auto f = static_cast<std::size_t>(dim());
  return {all.begin() + static_cast<std::ptrdiff_t>((t - first) * f),
          all.begin() + static_cast<std::ptrdiff_t>((t - first + 1) * f)};
}

DualFc load_dual_fc(const WeightStore& store, const std::string& prefix)
{
  DualFc head{matrix(store, prefix + ".w1"), matrix(store, prefix + ".w2"), vec(store, prefix + ".a1"),
              vec(store, prefix + ".a2")};
  head.validate();
  return head;
}

Model Model::build(const WeightStore& store)
{
  store.validate();
  const auto& cfg = store.config;
  Model m{.config = cfg, .codec = MuLawTable(cfg.mu_spec()), .frn = FrameRateNetwork::from_store(store)};

  const auto sample = embedding(store, "gru_a.embed.sample");
  const auto prediction = embedding(store, "gru_a.embed.prediction");
  const auto excitation = embedding(store, "gru_a.embed.excitation");
  std::vector<const EmbeddingTable*> signals;
  for (const auto* table : {&sample, &prediction, &excitation})
    for (int i = 0; i < cfg.bunch_size; ++i)
      signals.push_back(table);
  m.gru_a_tables = precompute_input_tables(matrix(store, "gru_a.input_weight"), signals);
  m.gru_a_cond = matrix(store, "gru_a.cond_weight");
  m.gru_a_input_bias = vec(store, "gru_a.input_bias");
  m.gru_a_recurrent = store.sparse_tensor("gru_a.recurrent_weight");
  m.gru_a_recurrent_bias = vec(store, "gru_a.recurrent_bias");

  m.gru_b_input = matrix(store, "gru_b.input_weight");
  m.gru_b_input_bias = vec(store, "gru_b.input_bias");
  m.gru_b_recurrent = matrix(store, "gru_b.recurrent_weight");
  m.gru_b_recurrent_bias = vec(store, "gru_b.recurrent_bias");

  if (cfg.split.bunched())
    m.context_high = embedding(store, "context.embed.high");
  m.context_full = embedding(store, "context.embed.full");
  for (int i = 0; i < cfg.bunch_size; ++i)
  {
    const std::string prefix = "dual_fc." + std::to_string(i);
    m.heads_high.push_back(load_dual_fc(store, prefix + ".high"));
    if (cfg.split.bunched())
      m.heads_low.push_back(load_dual_fc(store, prefix + ".low"));
  }
  return m;
}

} // namespace blpc
