#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>

namespace blpc
{

/// exp(x) via range reduction x = n ln2 + r and a degree-7 polynomial on
/// |r| <= ln2/2. Relative error stays below 2e-7 on [-87, 88]. Branch-free so
/// loops over it auto-vectorize.
inline float fast_exp(float x) noexcept
{
  x = x < -87.0f ? -87.0f : (x > 88.0f ? 88.0f : x);
  const float n = std::floor(x * 1.44269504088896341f + 0.5f);
  float r = x - n * 0.693359375f;
  r = r - n * -2.12194440e-4f;
  float p = 1.98412698e-4f;
  p = p * r + 1.38888889e-3f;
  p = p * r + 8.33333333e-3f;
  p = p * r + 4.16666667e-2f;
  p = p * r + 1.66666667e-1f;
  p = p * r + 0.5f;
  p = p * r + 1.0f;
  p = p * r + 1.0f;
  const auto bits = static_cast<std::int32_t>(n + 127.0f) << 23;
  return p * std::bit_cast<float>(bits);
}

inline float fast_tanh(float x) noexcept
{
  const float ax = x < 0.0f ? -x : x;
  const float t = fast_exp(-2.0f * ax);
  const float y = (1.0f - t) / (1.0f + t);
  return x < 0.0f ? -y : y;
}

inline float fast_sigmoid(float x) noexcept
{
  return 1.0f / (1.0f + fast_exp(-x));
}

inline void tanh_inplace(std::span<float> v) noexcept
{
  float* p = v.data();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    p[i] = fast_tanh(p[i]);
}

inline void sigmoid_inplace(std::span<float> v) noexcept
{
  float* p = v.data();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    p[i] = fast_sigmoid(p[i]);
}

} // namespace blpc
