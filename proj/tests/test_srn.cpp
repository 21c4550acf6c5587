#include <doctest.h>

#include <cmath>
#include <map>

#include "blpc/baseline.hpp"
#include "blpc/error.hpp"
#include "blpc/model.hpp"
#include "blpc/srn.hpp"
#include "blpc/synth.hpp"
#include "harness.hpp"
#include "oracle.hpp"
#include "random_frames.hpp"

using namespace blpc;

namespace
{

const BitSplit k80{8, 0};
const BitSplit k74{7, 4};

const Model& model_for(int s, BitSplit split)
{
  static std::map<std::string, Model> cache;
  const auto cfg = ModelConfig::for_mode(s, split);
  auto it = cache.find(cfg.name());
  if (it == cache.end())
    it = cache.emplace(cfg.name(), Model::build(test::sharpened_weights(100 + s, cfg))).first;
  return it->second;
}

class ContextAudit : public StepObserver
{
public:
  explicit ContextAudit(const EmbeddingTable& table)
  : table_(table)
  {
  }

  void on_excitation(int, std::span<const float> before, int code, std::span<const float> after) override
  {
    ++calls;
    const auto row = table_.row(code);
    for (std::size_t j = 0; j < before.size(); ++j)
      if (after[j] != before[j] + row[j])
        ++mismatches;
  }

  int calls = 0;
  int mismatches = 0;

private:
  const EmbeddingTable& table_;
};

} // namespace

TEST_CASE("init_state fills silent histories")
{
  for (const BitSplit& split : {k80, k74})
  {
    const auto cfg = ModelConfig::for_mode(3, split);
    const SrnState st = init_state(cfg, 9);
    CHECK(st.initialized);
    CHECK(st.gru_a == FloatBuffer(384, 0.0f));
    CHECK(st.gru_b == FloatBuffer(16, 0.0f));
    CHECK(st.last_excitations == std::vector<int>(3, 1 << (split.total_bits() - 1)));
    CHECK(st.last_samples == std::vector<float>(3, 0.0f));
    CHECK(st.last_predictions == std::vector<float>(3, 0.0f));
    CHECK(st.history == FloatBuffer(16, 0.0f));
    CHECK(st == init_state(cfg, 9));
    CHECK_FALSE(st == init_state(cfg, 10));
  }
}

TEST_CASE("step rejects unusable states")
{
  const Model& model = model_for(2, k74);
  SampleRateNetwork net(model);
  SrnState st = init_state(model.config, 1);
  const LpcCoeffs lpc;
  CHECK_THROWS_AS(net.step(st, lpc), Error); // no frame yet
  net.set_frame(std::vector<float>(128, 0.0f));
  SrnState blank;
  CHECK_THROWS_AS(net.step(blank, lpc), Error);
  SrnState other = init_state(ModelConfig::for_mode(3, k74), 1);
  CHECK_THROWS_AS(net.step(other, lpc), Error);
  CHECK_THROWS_AS(net.set_frame(std::vector<float>(127, 0.0f)), Error);
  CHECK_NOTHROW(net.step(st, lpc));
}

TEST_CASE("every emitted sample is prediction plus decoded excitation")
{
  for (int s = 1; s <= 4; ++s)
    for (const BitSplit& split : {k80, k74})
    {
      const Model& model = model_for(s, split);
      const auto& cfg = model.config;
      const MuLawSpec mu = cfg.mu_spec();
      SampleRateNetwork net(model);
      SrnState st = init_state(cfg, 5);
      const auto frame = test::random_frames(1, 6)[0];
      const LpcCoeffs lpc = cepstrum_to_lpc(frame);
      net.set_frame(model.frn.forward(std::vector<FeatureFrame>{frame}));
      for (int step = 0; step < 60; ++step)
      {
        const std::uint64_t draws = st.rng.draws();
        const BunchOutput out = net.step(st, lpc);
        REQUIRE(out.count == s);
        REQUIRE(st.rng.draws() - draws == static_cast<std::uint64_t>(split.bunched() ? 2 * s : s));
        for (int i = 0; i < s; ++i)
        {
          const auto p = static_cast<std::size_t>(i);
          REQUIRE(out.high_codes[p] >= 0);
          REQUIRE(out.high_codes[p] < cfg.high_codes());
          REQUIRE(out.low_codes[p] >= 0);
          REQUIRE(out.low_codes[p] < cfg.low_codes());
          REQUIRE(out.excitation_codes[p] == recombine(out.high_codes[p], out.low_codes[p], split));
          REQUIRE(out.samples[p] == clamp16(out.predictions[p] + static_cast<float>(decode(out.excitation_codes[p], mu))));
        }
        // The carried prediction is the one the next bunch starts from.
        REQUIRE(st.last_excitations[static_cast<std::size_t>(s - 1)] == out.excitation_codes[static_cast<std::size_t>(s - 1)]);
      }
      CHECK(net.steps() == 60);
    }
}

TEST_CASE("zero LPC coefficients pass excitations straight through")
{
  for (const BitSplit& split : {k80, k74})
  {
    const Model& model = model_for(4, split);
    const MuLawSpec mu = model.config.mu_spec();
    SampleRateNetwork net(model);
    SrnState st = init_state(model.config, 8);
    net.set_frame(std::vector<float>(128, 0.1f));
    const LpcCoeffs zero;
    for (int step = 0; step < 30; ++step)
    {
      const BunchOutput out = net.step(st, zero);
      for (int i = 0; i < out.count; ++i)
      {
        const auto p = static_cast<std::size_t>(i);
        REQUIRE(out.predictions[p] == 0.0f);
        REQUIRE(out.samples[p] == decode(out.excitation_codes[p], mu));
      }
    }
  }
}

TEST_CASE("context recurrence adds exactly one embedding row per excitation")
{
  for (const BitSplit& split : {k80, k74})
  {
    const Model& model = model_for(4, split);
    SampleRateNetwork net(model);
    SrnState st = init_state(model.config, 2);
    net.set_frame(std::vector<float>(128, -0.2f));
    ContextAudit audit(model.context_full);
    for (int step = 0; step < 25; ++step)
      net.step(st, LpcCoeffs{}, 1.0f, &audit);
    CHECK(audit.calls == 100);
    CHECK(audit.mismatches == 0);
  }
}

TEST_CASE("network steps per frame follow the bunch size")
{
  for (int s = 1; s <= 4; ++s)
  {
    const Model& model = model_for(s, k74);
    Synthesizer synth(model);
    const auto pcm = synth.run(test::random_frames(1, 3), 4);
    CHECK(pcm.size() == 240);
    CHECK(synth.last_stats().network_steps == static_cast<std::uint64_t>(240 / s));
    CHECK(synth.last_stats().rng_draws == 480);
  }
  Synthesizer s4(model_for(4, k80));
  s4.run(test::random_frames(3, 3), 4);
  CHECK(s4.last_stats().network_steps == 180);
  CHECK(s4.last_stats().rng_draws == 720);
}

TEST_CASE("synthesis is deterministic for a fixed seed")
{
  const Model& model = model_for(4, k74);
  const auto frames = test::random_frames(100, 77);
  const auto a = synthesize(frames, model, 1234);
  const auto b = synthesize(frames, model, 1234);
  CHECK(a.size() == 24000);
  CHECK(a == b);
  CHECK(a != synthesize(frames, model, 1235));
  // Reusing one synthesizer gives the same result as a fresh one.
  Synthesizer synth(model);
  synth.run(frames, 99);
  CHECK(synth.run(frames, 1234) == a);
}

TEST_CASE("free srn_step matches the network object")
{
  const Model& model = model_for(3, k74);
  std::mt19937_64 gen(1);
  const SrnState start = test::random_state(model.config, gen);
  const std::vector<float> f(128, 0.3f);
  const LpcCoeffs lpc = cepstrum_to_lpc(test::random_frames(1, 2)[0]);
  SrnState a = start;
  SrnState b = start;
  SampleRateNetwork net(model);
  net.set_frame(f);
  const BunchOutput x = net.step(a, lpc);
  const BunchOutput y = srn_step(model, b, f, lpc);
  CHECK(x.samples == y.samples);
  CHECK(a == b);
}

TEST_CASE("zero weights keep the state silent and bounded")
{
  const auto cfg = ModelConfig::for_mode(4, k74);
  WeightStore store = generate_test_weights(1, cfg);
  for (auto& [name, t] : store.dense)
    std::fill(t.values.begin(), t.values.end(), 0.0f);
  std::vector<BlockSparseMatrix::Block> none;
  store.sparse["gru_a.recurrent_weight"] = BlockSparseMatrix::from_blocks(1152, 384, none);
  const Model model = Model::build(store);
  oracle::SrnOracle oracle(store);
  SampleRateNetwork net(model);
  SrnState st = init_state(cfg, 3);
  SrnState ref = st;
  FeatureFrame silence;
  silence.cepstrum[0] = -10.0f;
  const auto lpc = cepstrum_to_lpc(silence);
  const auto f = model.frn.forward(std::vector<FeatureFrame>{silence});
  net.set_frame(f);
  for (int step = 0; step < 240; ++step)
  {
    const BunchOutput a = net.step(st, lpc);
    const BunchOutput b = oracle.step(ref, f, lpc);
    REQUIRE(a.excitation_codes == b.excitation_codes);
    REQUIRE(a.samples == b.samples);
  }
  CHECK(st == ref);
  for (float v : st.gru_a)
    CHECK(std::abs(v) < 1.0f);
  for (float v : st.gru_b)
    CHECK(std::abs(v) < 1.0f);
  for (float v : net.context())
    CHECK(v == 0.0f);
}

TEST_CASE("optimized step matches the oracle in every configuration")
{
  for (int s = 1; s <= 4; ++s)
    for (const BitSplit& split : {k80, k74})
    {
      const auto cfg = ModelConfig::for_mode(s, split);
      const auto report = test::oracle_equivalence(cfg, 20, 500 + s, 10, 3);
      CAPTURE(cfg.name());
      MESSAGE(cfg.name() << ": worst GRU state relative error " << report.worst_state_error);
      CHECK(report.code_mismatches == 0);
      CHECK(report.sample_mismatches == 0);
      CHECK(report.draw_mismatches == 0);
      CHECK(report.worst_state_error <= 1e-5);
    }
}

TEST_CASE("S=1 unsplit bunching reproduces the unbunched baseline")
{
  const auto report = test::baseline_degeneracy(10, 31);
  CHECK(report.samples == 2400);
  CHECK(report.mismatched_samples == 0);
  CHECK(report.bunched_draws == 2400);
  CHECK(report.bunched_draws == report.baseline_draws);
}

TEST_CASE("baseline vocoder rejects bunched models")
{
  CHECK_THROWS_AS(BaselineVocoder(model_for(2, k80)), Error);
  CHECK_THROWS_AS(BaselineVocoder(model_for(1, k74)), Error);
}

TEST_CASE("temperature changes the sampled stream")
{
  const Model& model = model_for(2, k74);
  const auto frames = test::random_frames(2, 1);
  const auto warm = synthesize(frames, model, 5, 1.0f);
  const auto cold = synthesize(frames, model, 5, 0.3f);
  CHECK(warm != cold);
  CHECK_THROWS_AS(synthesize(frames, model, 5, 0.0f), Error);
}
