#include "blpc/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "blpc/activations.hpp"
#include "blpc/error.hpp"

namespace blpc
{

namespace
{

inline std::int32_t order_key(float x) noexcept
{
  const auto b = std::bit_cast<std::int32_t>(x);
  return b ^ ((b >> 31) & 0x7fffffff);
}

inline float from_order_key(std::int32_t k) noexcept
{
  return std::bit_cast<float>(k ^ ((k >> 31) & 0x7fffffff));
}

// Writes unnormalized exp((l - max) / T) into out.
void exponentiate(std::span<const float> logits, float temperature, std::span<float> out)
{
  if (!(temperature > 0.0f)) [[unlikely]]
    throw Error(Errc::invalid_input, "sampling temperature must be positive");
  if (out.size() < logits.size() || logits.empty()) [[unlikely]]
    throw Error(Errc::invalid_input, "softmax buffer size mismatch");
  const std::size_t n = logits.size();
  const float* l = logits.data();
  // Max and min over integer keys that sort like the floats: integer
  // reductions vectorize without fast-math, and NaNs land beyond +-inf.
  std::int32_t key_max = std::numeric_limits<std::int32_t>::min();
  std::int32_t key_min = std::numeric_limits<std::int32_t>::max();
  for (std::size_t i = 0; i < n; ++i)
  {
    const std::int32_t k = order_key(l[i]);
    key_max = k > key_max ? k : key_max;
    key_min = k < key_min ? k : key_min;
  }
  const float max_logit = from_order_key(key_max);
  const float min_logit = from_order_key(key_min);
  if (!std::isfinite(max_logit) || !std::isfinite(min_logit)) [[unlikely]]
    throw Error(Errc::numeric, "non-finite logit");
  const float inv_t = 1.0f / temperature;
  float* p = out.data();
  for (std::size_t i = 0; i < n; ++i)
    p[i] = fast_exp((l[i] - max_logit) * inv_t);
}

// Plain inverse CDF, used above the blocked sampler's size limit.
int sequential_sample(std::span<const float> p, double u)
{
  double total = 0.0;
  for (float v : p)
    total += v;
  const double target = u * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
  {
    acc += p[i];
    if (target < acc)
      return static_cast<int>(i);
  }
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0f)
      return static_cast<int>(i);
  return static_cast<int>(p.size() - 1);
}

constexpr std::size_t kBlock = 16;
constexpr std::size_t kMaxBlocks = 128;

} // namespace

void softmax(std::span<const float> logits, float temperature, std::span<float> probs)
{
  if (probs.size() != logits.size())
    throw Error(Errc::invalid_input, "softmax output size mismatch");
  exponentiate(logits, temperature, probs);
  double sum = 0.0;
  for (float p : probs)
    sum += p;
  const double inv = 1.0 / sum;
  for (float& p : probs)
    p = static_cast<float>(p * inv);
}

int softmax_sample(std::span<const float> logits, Rng& rng, float temperature, std::span<float> scratch)
{
  exponentiate(logits, temperature, scratch);
  const std::size_t n = logits.size();
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  const float* p = scratch.data();
  if (blocks > kMaxBlocks) [[unlikely]]
    return sequential_sample(std::span<const float>(p, n), rng.uniform());

  // Inverse CDF in two levels: block totals first (independent chains, one per
  // block), then a walk inside the selected block.
  double block_sum[kMaxBlocks] = {};
  const std::size_t full = n / kBlock;
  for (std::size_t j = 0; j < kBlock; ++j)
    for (std::size_t b = 0; b < full; ++b)
      block_sum[b] += p[b * kBlock + j];
  for (std::size_t i = full * kBlock; i < n; ++i)
    block_sum[full] += p[i];
  double total = 0.0;
  for (std::size_t b = 0; b < blocks; ++b)
    total += block_sum[b];

  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t b = 0;
  while (b + 1 < blocks && !(target < acc + block_sum[b]))
    acc += block_sum[b++];
  const std::size_t begin = b * kBlock;
  const std::size_t end = std::min(n, begin + kBlock);
  for (std::size_t i = begin; i < end; ++i)
  {
    acc += p[i];
    if (target < acc)
      return static_cast<int>(i);
  }
  // Only reachable through rounding at the block edge: take the last nonzero bin.
  for (std::size_t i = end; i-- > begin;)
    if (p[i] > 0.0f)
      return static_cast<int>(i);
  return static_cast<int>(end - 1);
}

} // namespace blpc
