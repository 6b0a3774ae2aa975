#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "panobev/bev.hpp"
#include "panobev/image.hpp"
#include "panobev/tensor.hpp"

namespace panobev {

struct AugmentSpec {
  double flip_probability = 0.0;
  double mix_lambda = 1.0;       // weight on the first input
  double bev_rotation_rad = 0.0;
  std::optional<double> rotation_center_x;  // cells; defaults to grid center
  std::optional<double> rotation_center_y;
  uint64_t seed = 0;

  void validate() const;
  static AugmentSpec from_json(const std::string& text);
};

// Plain horizontal mirror: out(x, y) = in(W-1-x, y).
PanoramaImage pano_flip(const PanoramaImage& img);
DepthPanorama pano_flip(const DepthPanorama& img);
SemanticPanorama pano_flip(const SemanticPanorama& img);

// Mirror about the forward axis with seam wrap: out(x) = in((W-2-x) mod W).
// On the pixel-center grid this maps azimuth exactly to 2pi - phi, which
// is what pairs cell-for-cell with the BEV mirror; the plain mirror is
// offset from that by one column of azimuth.
PanoramaImage pano_flip_seam_aligned(const PanoramaImage& img);
DepthPanorama pano_flip_seam_aligned(const DepthPanorama& img);
SemanticPanorama pano_flip_seam_aligned(const SemanticPanorama& img);

// Circular column shift (a yaw step; also a test helper).
PanoramaImage pano_roll(const PanoramaImage& img, int64_t cols);
DepthPanorama pano_roll(const DepthPanorama& img, int64_t cols);
SemanticPanorama pano_roll(const SemanticPanorama& img, int64_t cols);

// Per-pixel blend lambda*a + (1-lambda)*b, rounded half-up.
PanoramaImage pano_mix(const PanoramaImage& a, const PanoramaImage& b,
                       double lambda);

// Mirror across the sensor's forward axis (y -> -y): rows reversed for
// labels, mask and heights.
SemanticBevMap bev_flip(const SemanticBevMap& map);

// Inverse-warp nearest rotation in cell coordinates about (center_x,
// center_y); cells mapping outside become unobserved. Heights rotate
// with their cells.
SemanticBevMap bev_rotate(const SemanticBevMap& map, double theta,
                          double center_x, double center_y);

// Categorical mixing: per-cell Bernoulli(lambda) keeps the first map's
// cell, else the second's. Deterministic for a given seed.
SemanticBevMap bev_mix_mask(const SemanticBevMap& a, const SemanticBevMap& b,
                            double lambda, uint64_t seed);

// Probability-volume mixing on one-hot / probability tensors (f32,
// L x Y x X). Raw label grids are rejected: class ids cannot be averaged.
Tensor bev_mix_prob(const Tensor& a, const Tensor& b, double lambda);

Tensor bev_to_onehot(const SemanticBevMap& map, uint32_t num_classes);

struct Sample {
  std::optional<PanoramaImage> rgb;
  std::optional<DepthPanorama> depth;
  std::optional<SemanticPanorama> semantic;
  std::optional<SemanticBevMap> gt_bev;
};

struct AugmentOutcome {
  Sample sample;
  std::string metadata_json;  // the drawn decisions, replayable
};

// Applies one seeded draw of the joint panorama/BEV augmentation: the
// flip decision uses the seam-aligned panorama mirror paired with the
// BEV mirror, then the configured BEV rotation, and mixing against an
// partner (RGB blend + BEV Bernoulli mix; depth and semantic panoramas
// are never blended). The rng stream derives from (seed, sample_id).
AugmentOutcome joint_augment(const Sample& sample, const AugmentSpec& spec,
                             uint64_t sample_id = 0,
                             const Sample* mix_partner = nullptr);

// Re-applies recorded metadata; bitwise identical to the original call.
Sample replay_augment(const Sample& sample, const std::string& metadata_json,
                      const Sample* mix_partner = nullptr);

}  // namespace panobev
