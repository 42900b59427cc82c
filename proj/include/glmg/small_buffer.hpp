#pragma once

#include <cstddef>
#include <memory>
#include <new>
#include <type_traits>

namespace glmg {

/// Fixed-size scratch array that lives inline up to `Inline` elements and on the heap beyond.
/// Only the first n elements are ever constructed.
template <typename T, std::size_t Inline>
class SmallBuffer {
  static_assert(std::is_trivially_destructible_v<T>);

 public:
  explicit SmallBuffer(std::size_t n, const T& init = T{}) : size_(n) {
    if (n > Inline) {
      heap_ = std::make_unique<T[]>(n);
      data_ = heap_.get();
    } else {
      data_ = std::launder(reinterpret_cast<T*>(storage_));
    }
    for (std::size_t i = 0; i < n; ++i) ::new (static_cast<void*>(data_ + i)) T(init);
  }
  SmallBuffer(const SmallBuffer&) = delete;
  SmallBuffer& operator=(const SmallBuffer&) = delete;

  T* data() { return data_; }
  const T* data() const { return data_; }
  std::size_t size() const { return size_; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T* begin() { return data_; }
  T* end() { return data_ + size_; }

 private:
  alignas(T) unsigned char storage_[sizeof(T) * Inline];
  std::unique_ptr<T[]> heap_;
  std::size_t size_;
  T* data_;
};

}  // namespace glmg
