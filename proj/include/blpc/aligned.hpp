#pragma once

#include <cstddef>
#include <new>
#include <vector>

namespace blpc
{

/// Cache-line alignment for kernel buffers. Without it, wide vector loads may
/// straddle two lines and timing depends on where the heap happened to put a
/// buffer.
inline constexpr std::size_t kBufferAlignment = 64;

template <class T>
struct AlignedAllocator
{
  using value_type = T;

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept
  {
  }

  T* allocate(std::size_t n)
  {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{kBufferAlignment}));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{kBufferAlignment}); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept
  {
    return true;
  }
};

using FloatBuffer = std::vector<float, AlignedAllocator<float>>;

} // namespace blpc
