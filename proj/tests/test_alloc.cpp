#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <new>

#include "blpc/bench.hpp"
#include "blpc/model.hpp"
#include "blpc/synth.hpp"
#include "blpc/weights.hpp"

namespace
{
std::atomic<long> g_allocations{0};
}

void* operator new(std::size_t size)
{
  g_allocations.fetch_add(1, std::memory_order_relaxed);
  if (void* p = std::malloc(size ? size : 1))
    return p;
  throw std::bad_alloc();
}

void operator delete(void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }

using namespace blpc;

TEST_CASE("run_into does not allocate after reserve")
{
  for (const auto& cfg : evaluated_configs())
  {
    CAPTURE(cfg.name());
    const Model model = Model::build(generate_test_weights(9, cfg));
    const auto frames = demo_features(20, 3);
    std::vector<std::int16_t> pcm(frames.size() * static_cast<std::size_t>(cfg.frame_size));
    Synthesizer synth(model);
    synth.reserve(frames.size());

    const long before = g_allocations.load();
    synth.run_into(frames, 1, 1.0f, pcm);
    const long during = g_allocations.load() - before;
    CHECK(during == 0);
  }
}

TEST_CASE("second run of the same length does not allocate")
{
  const auto cfg = ModelConfig::for_mode(4, BitSplit{7, 4});
  const Model model = Model::build(generate_test_weights(4, cfg));
  const auto frames = demo_features(12, 8);
  std::vector<std::int16_t> pcm(frames.size() * static_cast<std::size_t>(cfg.frame_size));
  Synthesizer synth(model);
  synth.run_into(frames, 2, 1.0f, pcm);

  const long before = g_allocations.load();
  synth.run_into(frames, 2, 1.0f, pcm);
  CHECK(g_allocations.load() - before == 0);
}
