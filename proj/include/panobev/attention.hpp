#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "panobev/projection.hpp"
#include "panobev/spherical.hpp"
#include "panobev/tensor.hpp"

namespace panobev {

// Double-precision row-major matrix; the working type for queries,
// attention weights and gradients.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  const double* row(std::size_t r) const { return v.data() + r * cols; }
  double* row(std::size_t r) { return v.data() + r * cols; }
};

using BevQueries = Mat;        // N x C, one row per BEV reference point
using AttentionWeights = Mat;  // N x n_ref, rows sum to 1

// Panoramic image feature map, C x H x W.
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> v;

  FeatureMap() = default;
  FeatureMap(std::size_t c, std::size_t h, std::size_t w)
      : channels(c), height(h), width(w), v(c * h * w, 0.0) {}

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return v[(c * height + y) * width + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return v[(c * height + y) * width + x];
  }
};

struct LinearLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;  // out x in, row-major
  std::vector<double> bias;    // out

  LinearLayer() = default;
  LinearLayer(std::size_t i, std::size_t o)
      : in(i), out(o), weight(i * o, 0.0), bias(o, 0.0) {}

  void apply(const double* x, double* y) const {
    for (std::size_t r = 0; r < out; ++r) {
      double s = bias[r];
      const double* w = weight.data() + r * in;
      for (std::size_t c = 0; c < in; ++c) s += w[c] * x[c];
      y[r] = s;
    }
  }
};

// The learned heads of PD Attention: spherical position encoding,
// spherical angular offsets, per-reference 2D offsets, and the
// attention-weight head.
struct LinearParams {
  std::size_t channels = 0;  // C
  std::size_t n_ref = 0;     // sampled points per query
  LinearLayer pos;           // 2 -> C
  LinearLayer sph_offsets;   // C -> 2
  LinearLayer ref_offsets;   // C -> 2*n_ref
  LinearLayer attn;          // C -> n_ref
};

// Deterministic for a given seed. The position encoding gets a random
// uniform init; both offset heads and the weight head start at zero so
// the initial sampling sits at the geometric reference with uniform
// attention.
LinearParams init_params(uint32_t channels, uint32_t n_ref, uint64_t seed);

// Fills every head with small random values; used by gradient checking
// and fixtures where zero heads would leave paths unexercised.
void randomize_params(LinearParams& params, uint64_t seed, double scale = 0.1);

struct SphericalRefs {
  std::vector<SphericalAngle> angles;

  std::size_t size() const { return angles.size(); }
};

SphericalRefs refs_from_points(const std::vector<Vec3>& points);

struct AngularOffsets {
  std::vector<double> dphi;
  std::vector<double> dtheta;

  std::size_t size() const { return dphi.size(); }
};

// Optional tanh bounding of the spherical offsets.
struct OffsetBound {
  bool enabled = false;
  double delta_max = M_PI / 8.0;
};

struct SgcOffsets {
  AngularOffsets offsets;          // one entry per kept row
  std::vector<uint32_t> rows;      // original row indices kept by the mask
};

// (dphi, dtheta) = f_offsets(mask(Q) + f_pos(mask(S))); masked-out rows
// produce no output row.
SgcOffsets sgc_offsets(const BevQueries& queries, const SphericalRefs& refs,
                       const ValidMask& mask, const LinearParams& params,
                       const OffsetBound& bound = {});

// Elementwise sum; azimuth wrapped to [0, 2pi), polar clamped to [0, pi].
SphericalRefs apply_offsets(const SphericalRefs& refs,
                            const AngularOffsets& offsets);

// Equirectangular index per reference (delegates to sph_to_pixel).
std::vector<PixelIndex> sgc_index(const SphericalRefs& refs, uint32_t height,
                                  uint32_t width);

// Fractional sampling locations: base index plus the 2D offsets
// predicted from each query.
struct SampleGrid {
  std::size_t count = 0;   // queries
  std::size_t n_ref = 0;   // samples per query
  std::vector<double> row; // count * n_ref
  std::vector<double> col;

  double& row_at(std::size_t q, std::size_t j) { return row[q * n_ref + j]; }
  double& col_at(std::size_t q, std::size_t j) { return col[q * n_ref + j]; }
  double row_at(std::size_t q, std::size_t j) const { return row[q * n_ref + j]; }
  double col_at(std::size_t q, std::size_t j) const { return col[q * n_ref + j]; }
};

SampleGrid sample_locations(const BevQueries& queries,
                            const std::vector<PixelIndex>& index,
                            const LinearParams& params);

// Softmax of the weight head; rows sum to 1.
AttentionWeights attention_weights(const BevQueries& queries,
                                   const LinearParams& params);

// Bilinear lookup with azimuthal wrap on columns and clamp on rows.
double bilinear_sample(const FeatureMap& f, std::size_t channel, double row,
                       double col);

// Weighted sum of bilinear samples with explicit locations and weights;
// the reduction at the heart of SDA.
Mat sda_aggregate(const SampleGrid& where, const AttentionWeights& weights,
                  const FeatureMap& f);

struct SdaResult {
  Mat output;                // N x C
  AttentionWeights weights;  // N x n_ref
};

// Offsets and weights derived from the queries, then aggregation.
SdaResult sda_forward(const BevQueries& queries,
                      const std::vector<PixelIndex>& index,
                      const FeatureMap& f, const LinearParams& params);

// Full Eqs. composition over masked inputs, retaining what the backward
// pass needs. Gradients treat the quantized base index as constant, so
// the spherical heads receive zero gradient by construction.
struct PdAttentionCache;

struct PdAttentionResult {
  Mat output;                  // kept x C
  AttentionWeights weights;    // kept x n_ref
  std::vector<uint32_t> rows;  // original row per output row
};

PdAttentionResult pd_attention_forward(
    const BevQueries& queries, const SphericalRefs& refs,
    const ValidMask& mask, const FeatureMap& features,
    const LinearParams& params, const OffsetBound& bound = {},
    std::shared_ptr<PdAttentionCache>* cache_out = nullptr);

// Same kernel applied per feature level, outputs summed.
PdAttentionResult pd_attention_forward_multi(
    const BevQueries& queries, const SphericalRefs& refs,
    const ValidMask& mask, const std::vector<FeatureMap>& levels,
    const LinearParams& params, const OffsetBound& bound = {});

struct PdAttentionGrads {
  Mat d_queries;          // full N x C; zeros on masked rows
  FeatureMap d_features;
  LinearParams d_params;  // same shapes, holding gradients
};

// Analytic gradients of the forward composition for upstream dL/d(output)
// of shape kept x C.
PdAttentionGrads sda_backward(const PdAttentionCache& cache,
                              const Mat& upstream);

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t checked = 0;
  double tolerance = 1e-4;
  bool pass() const { return max_rel_err <= tolerance; }
};

// Seeded end-to-end gradient check of every parameter group plus the Q
// and F inputs against central finite differences.
GradCheckReport run_gradient_check(uint32_t n_queries, uint32_t channels,
                                   uint32_t n_ref, uint32_t height,
                                   uint32_t width, uint64_t seed,
                                   double step = 1e-4);

// Tensor bridging for the PBT/C interfaces (f32 on disk, f64 in core).
Mat mat_from_tensor(const Tensor& t);
Tensor mat_to_tensor(const Mat& m);
FeatureMap feature_map_from_tensor(const Tensor& t);
Tensor feature_map_to_tensor(const FeatureMap& f);

// Params are packed into a single 1-D f32 PBT tensor:
// [channels, n_ref, pos.w, pos.b, sph.w, sph.b, ref.w, ref.b, attn.w, attn.b].
Tensor pack_params(const LinearParams& params);
LinearParams unpack_params(const Tensor& t);

}  // namespace panobev
