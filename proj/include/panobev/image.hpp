#pragma once

#include <cstdint>
#include <vector>

#include "panobev/errors.hpp"
#include "panobev/tensor.hpp"

namespace panobev {

// Equirectangular RGB panorama, 8-bit, row-major, 3 channels interleaved.
struct PanoramaImage {
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<uint8_t> rgb;  // height*width*3

  PanoramaImage() = default;
  PanoramaImage(uint32_t h, uint32_t w)
      : height(h), width(w), rgb(static_cast<std::size_t>(h) * w * 3, 0) {}

  uint8_t& at(uint32_t r, uint32_t c, uint32_t ch) {
    return rgb[(static_cast<std::size_t>(r) * width + c) * 3 + ch];
  }
  uint8_t at(uint32_t r, uint32_t c, uint32_t ch) const {
    return rgb[(static_cast<std::size_t>(r) * width + c) * 3 + ch];
  }

  Tensor to_tensor() const {
    return Tensor::from<uint8_t>({height, width, 3},
                                 {rgb.data(), rgb.size()});
  }

  static PanoramaImage from_tensor(const Tensor& t) {
    require(t.dtype() == DType::u8 && t.ndim() == 3 && t.dim(2) == 3,
            ErrorCode::invalid_argument, "expected u8 HxWx3 tensor");
    PanoramaImage img(t.dim(0), t.dim(1));
    auto v = t.as<uint8_t>();
    img.rgb.assign(v.begin(), v.end());
    return img;
  }
};

// Equirectangular depth panorama in meters. Values <= 0 mean "no return";
// kNoDepth is the canonical sentinel (mirrors the u16-millimeter sample 0
// convention used on disk).
struct DepthPanorama {
  static constexpr float kNoDepth = 0.0f;

  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<float> meters;  // height*width

  DepthPanorama() = default;
  DepthPanorama(uint32_t h, uint32_t w)
      : height(h), width(w),
        meters(static_cast<std::size_t>(h) * w, kNoDepth) {}

  float& at(uint32_t r, uint32_t c) {
    return meters[static_cast<std::size_t>(r) * width + c];
  }
  float at(uint32_t r, uint32_t c) const {
    return meters[static_cast<std::size_t>(r) * width + c];
  }
  bool valid(uint32_t r, uint32_t c) const { return at(r, c) > 0.0f; }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (float m : meters) n += m > 0.0f;
    return n;
  }

  Tensor to_tensor() const {
    return Tensor::from<float>({height, width}, {meters.data(), meters.size()});
  }

  static DepthPanorama from_tensor(const Tensor& t) {
    require(t.dtype() == DType::f32 && t.ndim() == 2,
            ErrorCode::invalid_argument, "expected f32 HxW tensor");
    DepthPanorama d(t.dim(0), t.dim(1));
    auto v = t.as<float>();
    d.meters.assign(v.begin(), v.end());
    return d;
  }
};

// Per-pixel class labels; kUnlabeled marks pixels without a class.
struct SemanticPanorama {
  static constexpr uint8_t kUnlabeled = 255;

  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<uint8_t> labels;  // height*width

  SemanticPanorama() = default;
  SemanticPanorama(uint32_t h, uint32_t w)
      : height(h), width(w),
        labels(static_cast<std::size_t>(h) * w, kUnlabeled) {}

  uint8_t& at(uint32_t r, uint32_t c) {
    return labels[static_cast<std::size_t>(r) * width + c];
  }
  uint8_t at(uint32_t r, uint32_t c) const {
    return labels[static_cast<std::size_t>(r) * width + c];
  }

  Tensor to_tensor() const {
    return Tensor::from<uint8_t>({height, width},
                                 {labels.data(), labels.size()});
  }

  static SemanticPanorama from_tensor(const Tensor& t) {
    require(t.dtype() == DType::u8 && t.ndim() == 2,
            ErrorCode::invalid_argument, "expected u8 HxW tensor");
    SemanticPanorama s(t.dim(0), t.dim(1));
    auto v = t.as<uint8_t>();
    s.labels.assign(v.begin(), v.end());
    return s;
  }
};

}  // namespace panobev
