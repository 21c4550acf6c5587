#include <doctest.h>

#include <cmath>

#include "blpc/error.hpp"
#include "blpc/model.hpp"
#include "blpc/weights.hpp"
#include "oracle.hpp"
#include "random_frames.hpp"

using namespace blpc;

namespace
{

const WeightStore& store()
{
  static const WeightStore s = generate_test_weights(21, ModelConfig::for_mode(1, {8, 0}));
  return s;
}

double max_abs_diff(std::span<const float> a, std::span<const double> b)
{
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    err = std::max(err, std::abs(a[i] - b[i]));
  return err;
}

} // namespace

TEST_CASE("zero weights give a zero conditioning vector")
{
  WeightStore zero = store();
  for (auto& [name, t] : zero.dense)
    if (name.rfind("frn.", 0) == 0)
      std::fill(t.values.begin(), t.values.end(), 0.0f);
  const auto frn = FrameRateNetwork::from_store(zero);
  const auto out = frn.forward(test::random_frames(5, 1));
  REQUIRE(out.size() == 5 * 128);
  for (float v : out)
    CHECK(v == 0.0f);
}

TEST_CASE("frame network matches the naive convolution oracle")
{
  const auto frn = FrameRateNetwork::from_store(store());
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
  {
    const auto frames = test::random_frames(1 + seed % 7, seed);
    const auto got = frn.forward(frames);
    const auto want = oracle::frn(store(), frames);
    REQUIRE(got.size() == want.size());
    worst = std::max(worst, max_abs_diff(got, want));
  }
  MESSAGE("worst abs error " << worst);
  CHECK(worst < 1e-6);
}

TEST_CASE("identical frames give identical outputs")
{
  const auto frn = FrameRateNetwork::from_store(store());
  const auto frames = std::vector<FeatureFrame>(9, test::random_frames(1, 3)[0]);
  const auto out = frn.forward(frames);
  CHECK(out == frn.forward(frames));
  // Away from the zero-padded edges every frame sees the same receptive field.
  for (std::size_t t = 3; t < 7; ++t)
    CHECK(std::equal(out.begin() + 2 * 128, out.begin() + 3 * 128, out.begin() + static_cast<std::ptrdiff_t>(t * 128)));
}

TEST_CASE("output depends only on frames t-2..t+2")
{
  const auto frn = FrameRateNetwork::from_store(store());
  auto frames = test::random_frames(12, 4);
  const auto base = frn.forward(frames);
  const std::size_t t = 6;
  for (std::size_t far : {std::size_t{0}, std::size_t{3}, std::size_t{9}, std::size_t{11}})
  {
    auto changed = frames;
    changed[far].cepstrum[0] += 5.0f;
    changed[far].pitch_period += 50.0f;
    const auto out = frn.forward(changed);
    CHECK(std::equal(out.begin() + t * 128, out.begin() + (t + 1) * 128, base.begin() + t * 128));
  }
  auto near = frames;
  near[t + 2].cepstrum[1] += 1.0f;
  const auto out = frn.forward(near);
  CHECK_FALSE(std::equal(out.begin() + t * 128, out.begin() + (t + 1) * 128, base.begin() + t * 128));

  for (std::size_t i = 0; i < frames.size(); ++i)
  {
    const auto single = frn.forward_at(frames, i);
    CHECK(std::equal(single.begin(), single.end(), base.begin() + static_cast<std::ptrdiff_t>(i * 128)));
  }
}

TEST_CASE("malformed frames are rejected")
{
  const auto frn = FrameRateNetwork::from_store(store());
  auto frames = test::random_frames(3, 5);
  frames[1].cepstrum[7] = std::nanf("");
  CHECK_THROWS_AS(frn.forward(frames), Error);
  frames[1].cepstrum[7] = 0.0f;
  frames[2].pitch_period = -1.0f;
  CHECK_THROWS_AS(frn.forward(frames), Error);
  const std::vector<float> short_frame(21, 0.0f);
  CHECK_THROWS_AS(FeatureFrame::from_values(short_frame), Error);
  std::vector<float> out(10);
  FrnWorkspace ws;
  CHECK_THROWS_AS(frn.forward(test::random_frames(1, 1), out, ws), Error);
}

TEST_CASE("empty input gives empty output")
{
  const auto frn = FrameRateNetwork::from_store(store());
  CHECK(frn.forward(std::vector<FeatureFrame>{}).empty());
}
