#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blpc/codec.hpp"
#include "blpc/error.hpp"

namespace blpc::oracle
{

namespace
{

double sigmoid(double x)
{
  return 1.0 / (1.0 + std::exp(-x));
}

std::vector<double> widen(std::span<const float> v)
{
  return {v.begin(), v.end()};
}

const std::vector<float>& values(const WeightStore& store, const std::string& name)
{
  return store.tensor(name).values;
}

} // namespace

std::vector<double> matvec(std::span<const float> w, std::size_t rows, std::size_t cols, std::span<const double> x)
{
  if (w.size() != rows * cols || x.size() != cols)
    throw std::invalid_argument("oracle matvec shape mismatch");
  std::vector<double> y(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
  {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c)
      acc += static_cast<double>(w[r * cols + c]) * x[c];
    y[r] = acc;
  }
  return y;
}

std::vector<double> gru(std::span<const double> h, std::span<const double> x, std::span<const double> g)
{
  const std::size_t n = h.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    const double z = sigmoid(x[i] + g[i]);
    const double r = sigmoid(x[n + i] + g[n + i]);
    const double cand = std::tanh(x[2 * n + i] + r * g[2 * n + i]);
    out[i] = z * h[i] + (1.0 - z) * cand;
  }
  return out;
}

std::vector<double> dual_fc(const WeightStore& store, const std::string& prefix, std::span<const double> c)
{
  const auto& w1 = store.tensor(prefix + ".w1");
  const auto& w2 = store.tensor(prefix + ".w2");
  const auto& a1 = values(store, prefix + ".a1");
  const auto& a2 = values(store, prefix + ".a2");
  const std::size_t k = w1.shape[0];
  const std::size_t in = w1.shape[1];
  const auto y1 = matvec(w1.values, k, in, c);
  const auto y2 = matvec(w2.values, k, in, c);
  std::vector<double> logits(k);
  for (std::size_t i = 0; i < k; ++i)
    logits[i] = a1[i] * std::tanh(y1[i]) + a2[i] * std::tanh(y2[i]);
  return logits;
}

int sample(std::span<const double> logits, Rng& rng, double temperature)
{
  for (double l : logits)
    if (!std::isfinite(l))
      throw Error(Errc::numeric, "non-finite logit");
  const double max = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
  {
    p[i] = std::exp((logits[i] - max) / temperature);
    sum += p[i];
  }
  const double target = rng.uniform() * sum;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
  {
    acc += p[i];
    if (target < acc)
      return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

std::vector<double> frn(const WeightStore& store, std::span<const FeatureFrame> frames)
{
  const std::size_t f = store.config.frn_dim;
  const std::size_t n = frames.size();
  const auto& c1 = values(store, "frn.conv1.weight"); // [f, 3, 22]
  const auto& c2 = values(store, "frn.conv2.weight"); // [f, 3, f]

  std::vector<std::vector<double>> x(n);
  for (std::size_t t = 0; t < n; ++t)
  {
    const auto v = frames[t].values();
    x[t].assign(v.begin(), v.end());
    x[t][kNumBands] = (frames[t].pitch_period - 200.0) / 100.0;
  }

  auto conv = [&](const std::vector<float>& w, const std::string& bias_name, const std::vector<std::vector<double>>& in,
                  std::size_t width) {
    const auto& bias = values(store, bias_name);
    std::vector<std::vector<double>> out(n, std::vector<double>(f));
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t o = 0; o < f; ++o)
      {
        double acc = bias[o];
        for (int tap = 0; tap < 3; ++tap)
        {
          const long src = static_cast<long>(t) + tap - 1;
          if (src < 0 || src >= static_cast<long>(n))
            continue;
          for (std::size_t i = 0; i < width; ++i)
            acc += w[(o * 3 + static_cast<std::size_t>(tap)) * width + i] * in[static_cast<std::size_t>(src)][i];
        }
        out[t][o] = std::tanh(acc);
      }
    return out;
  };
  const auto h1 = conv(c1, "frn.conv1.bias", x, kFeatureDim);
  auto h2 = conv(c2, "frn.conv2.bias", h1, f);

  std::vector<double> result;
  result.reserve(n * f);
  for (std::size_t t = 0; t < n; ++t)
  {
    for (std::size_t i = 0; i < f; ++i)
      h2[t][i] += h1[t][i];
    auto d1 = matvec(values(store, "frn.dense1.weight"), f, f, h2[t]);
    const auto& b1 = values(store, "frn.dense1.bias");
    for (std::size_t i = 0; i < f; ++i)
      d1[i] = std::tanh(d1[i] + b1[i]);
    auto d2 = matvec(values(store, "frn.dense2.weight"), f, f, d1);
    const auto& b2 = values(store, "frn.dense2.bias");
    for (std::size_t i = 0; i < f; ++i)
      result.push_back(std::tanh(d2[i] + b2[i]));
  }
  return result;
}

SrnOracle::SrnOracle(const WeightStore& store)
: store_(&store)
, recurrent_a_(store.sparse_tensor("gru_a.recurrent_weight").densify())
{
}

BunchOutput SrnOracle::step(SrnState& state, std::span<const float> conditioning, const LpcCoeffs& lpc,
                            double temperature)
{
  const WeightStore& w = *store_;
  const ModelConfig& cfg = w.config;
  check_state(state, cfg);
  const MuLawSpec mu = cfg.mu_spec();
  const std::size_t s = static_cast<std::size_t>(cfg.bunch_size);
  const std::size_t a = static_cast<std::size_t>(cfg.gru_a_units);
  const std::size_t b = static_cast<std::size_t>(cfg.gru_b_units);
  const std::size_t f = static_cast<std::size_t>(cfg.frn_dim);
  const std::size_t e = static_cast<std::size_t>(cfg.embed_dim);
  const int shift = cfg.code_bits() - cfg.input_code_bits;

  // Explicit concatenated input: [emb(samples) | emb(predictions) | emb(excitations)].
  std::vector<double> input;
  auto append = [&](const std::string& table, int code) {
    const auto& t = values(w, table);
    const std::size_t row = static_cast<std::size_t>(code >> shift);
    for (std::size_t j = 0; j < e; ++j)
      input.push_back(t[row * e + j]);
  };
  for (std::size_t i = 0; i < s; ++i)
    append("gru_a.embed.sample", encode(static_cast<int>(state.last_samples[i]), mu));
  for (std::size_t i = 0; i < s; ++i)
    append("gru_a.embed.prediction", encode(clamp16(state.last_predictions[i]), mu));
  for (std::size_t i = 0; i < s; ++i)
    append("gru_a.embed.excitation", state.last_excitations[i]);

  const auto cond = widen(conditioning);
  auto xa = matvec(values(w, "gru_a.input_weight"), 3 * a, 3 * s * e, input);
  const auto xf = matvec(values(w, "gru_a.cond_weight"), 3 * a, f, cond);
  const auto& ba = values(w, "gru_a.input_bias");
  for (std::size_t i = 0; i < 3 * a; ++i)
    xa[i] += xf[i] + ba[i];
  const auto ha = widen(state.gru_a);
  auto ga = matvec(recurrent_a_, 3 * a, a, ha);
  const auto& bra = values(w, "gru_a.recurrent_bias");
  for (std::size_t i = 0; i < 3 * a; ++i)
    ga[i] += bra[i];
  gru_a_ = gru(ha, xa, ga);

  std::vector<double> in_b = gru_a_;
  in_b.insert(in_b.end(), cond.begin(), cond.end());
  auto xb = matvec(values(w, "gru_b.input_weight"), 3 * b, a + f, in_b);
  const auto& bb = values(w, "gru_b.input_bias");
  for (std::size_t i = 0; i < 3 * b; ++i)
    xb[i] += bb[i];
  const auto hb = widen(state.gru_b);
  auto gb = matvec(values(w, "gru_b.recurrent_weight"), 3 * b, b, hb);
  const auto& brb = values(w, "gru_b.recurrent_bias");
  for (std::size_t i = 0; i < 3 * b; ++i)
    gb[i] += brb[i];
  gru_b_ = gru(hb, xb, gb);

  BunchOutput out;
  out.count = cfg.bunch_size;
  std::vector<double> c_high = gru_b_;
  for (std::size_t i = 0; i < s; ++i)
  {
    const std::string prefix = "dual_fc." + std::to_string(i);
    const int high = sample(dual_fc(w, prefix + ".high", c_high), state.rng, temperature);
    int low = 0;
    if (cfg.split.low_bits > 0)
    {
      const auto& emb = values(w, "context.embed.high");
      std::vector<double> c_low(b);
      for (std::size_t j = 0; j < b; ++j)
        c_low[j] = c_high[j] + emb[static_cast<std::size_t>(high) * b + j];
      low = sample(dual_fc(w, prefix + ".low", c_low), state.rng, temperature);
    }
    const int code = recombine(high, low, cfg.split);
    out.high_codes[i] = high;
    out.low_codes[i] = low;
    out.excitation_codes[i] = code;
    const auto& full = values(w, "context.embed.full");
    for (std::size_t j = 0; j < b; ++j)
      c_high[j] += full[static_cast<std::size_t>(code) * b + j];
  }

  float prediction = state.last_predictions[s - 1];
  for (std::size_t i = 0; i < s; ++i)
  {
    const int sample_value = clamp16(prediction + static_cast<float>(decode(out.excitation_codes[i], mu)));
    out.samples[i] = static_cast<std::int16_t>(sample_value);
    out.predictions[i] = prediction;
    state.history.erase(state.history.begin());
    state.history.push_back(static_cast<float>(sample_value));
    prediction = predict(state.history, lpc);
    state.last_predictions[i] = prediction;
  }
  for (std::size_t i = 0; i < s; ++i)
  {
    state.last_samples[i] = out.samples[i];
    state.last_excitations[i] = out.excitation_codes[i];
  }
  std::copy(gru_a_.begin(), gru_a_.end(), state.gru_a.begin());
  std::copy(gru_b_.begin(), gru_b_.end(), state.gru_b.begin());
  return out;
}

BunchOutput oracle_srn_step(const WeightStore& store, SrnState& state, std::span<const float> conditioning,
                            const LpcCoeffs& lpc, double temperature)
{
  SrnOracle oracle(store);
  return oracle.step(state, conditioning, lpc, temperature);
}

} // namespace blpc::oracle
