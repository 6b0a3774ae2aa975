#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "panobev/errors.hpp"

namespace panobev {

// Dtype codes match the on-disk PBT encoding.
enum class DType : uint8_t { f32 = 0, u8 = 1, u16 = 2, i32 = 3 };

inline std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::f32: return 4;
    case DType::u8: return 1;
    case DType::u16: return 2;
    case DType::i32: return 4;
  }
  fail(ErrorCode::format, "unknown dtype code");
}

inline const char* dtype_name(DType t) {
  switch (t) {
    case DType::f32: return "f32";
    case DType::u8: return "u8";
    case DType::u16: return "u16";
    case DType::i32: return "i32";
  }
  return "?";
}

namespace detail {
template <typename T> struct dtype_of;
template <> struct dtype_of<float> { static constexpr DType value = DType::f32; };
template <> struct dtype_of<uint8_t> { static constexpr DType value = DType::u8; };
template <> struct dtype_of<uint16_t> { static constexpr DType value = DType::u16; };
template <> struct dtype_of<int32_t> { static constexpr DType value = DType::i32; };
}  // namespace detail

// Dense row-major tensor of up to 4 dimensions; the carrier for every
// on-disk array artifact (feature maps, queries, BEV channels, ...).
class Tensor {
public:
  Tensor() = default;

  Tensor(DType dtype, std::vector<uint32_t> dims)
      : dtype_(dtype), dims_(std::move(dims)) {
    validate_dims();
    data_.assign(byte_size(), std::byte{0});
  }

  template <typename T>
  static Tensor of(std::vector<uint32_t> dims) {
    return Tensor(detail::dtype_of<T>::value, std::move(dims));
  }

  template <typename T>
  static Tensor from(std::vector<uint32_t> dims, std::span<const T> values) {
    Tensor t = of<T>(std::move(dims));
    require(values.size() == t.element_count(), ErrorCode::invalid_argument,
            "tensor payload size does not match dims");
    std::memcpy(t.data_.data(), values.data(), t.byte_size());
    return t;
  }

  DType dtype() const { return dtype_; }
  const std::vector<uint32_t>& dims() const { return dims_; }
  uint32_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t ndim() const { return dims_.size(); }

  std::size_t element_count() const {
    std::size_t n = 1;
    for (uint32_t d : dims_) n *= d;
    return n;
  }

  std::size_t byte_size() const { return element_count() * dtype_size(dtype_); }

  std::byte* raw() { return data_.data(); }
  const std::byte* raw() const { return data_.data(); }

  template <typename T>
  std::span<T> as() {
    check_type<T>();
    return {reinterpret_cast<T*>(data_.data()), element_count()};
  }

  template <typename T>
  std::span<const T> as() const {
    check_type<T>();
    return {reinterpret_cast<const T*>(data_.data()), element_count()};
  }

  bool same_shape(const Tensor& o) const {
    return dtype_ == o.dtype_ && dims_ == o.dims_;
  }

private:
  void validate_dims() const {
    require(!dims_.empty() && dims_.size() <= 4, ErrorCode::invalid_argument,
            "tensor rank must be 1..4");
    for (uint32_t d : dims_)
      require(d >= 1, ErrorCode::invalid_argument, "tensor dims must be >= 1");
  }

  template <typename T>
  void check_type() const {
    require(detail::dtype_of<T>::value == dtype_, ErrorCode::invalid_argument,
            std::string("tensor dtype mismatch, stored ") + dtype_name(dtype_));
  }

  DType dtype_ = DType::f32;
  std::vector<uint32_t> dims_;
  std::vector<std::byte> data_;
};

}  // namespace panobev
