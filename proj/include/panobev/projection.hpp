#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "panobev/calibration.hpp"
#include "panobev/geometry.hpp"
#include "panobev/image.hpp"

namespace panobev {

struct BevGridSpec;  // bev.hpp

// 3D points in meters (camera frame unless stated otherwise) with
// optional per-point class labels and source-pixel indices.
struct LabeledPointCloud {
  std::vector<Vec3> points;
  std::vector<uint8_t> labels;         // empty or one per point
  std::vector<uint32_t> source_pixel;  // empty or one per point, row*W + col

  std::size_t size() const { return points.size(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_source_pixels() const { return !source_pixel.empty(); }

  void push(const Vec3& p, std::optional<uint8_t> label = std::nullopt,
            std::optional<uint32_t> pixel = std::nullopt) {
    points.push_back(p);
    if (label) labels.push_back(*label);
    if (pixel) source_pixel.push_back(*pixel);
  }
};

using ValidMask = std::vector<uint8_t>;

// Back-projects every valid depth pixel along its viewing ray; one point
// per valid pixel, source pixel recorded, label taken from the semantic
// panorama when given. Depth is Euclidean range.
LabeledPointCloud depth_to_points(const DepthPanorama& depth,
                                  const SemanticPanorama* semantic = nullptr);

// Rigid transform p' = R p + t; labels and source pixels preserved.
LabeledPointCloud transform_points(const LabeledPointCloud& cloud,
                                   const CalibrationExtrinsic& extrinsic);

struct SparseProjection {
  DepthPanorama depth;
  SemanticPanorama labels;   // only meaningful when the cloud has labels
  bool has_labels = false;
  std::size_t skipped = 0;   // points at the camera origin
};

// Projects a (LiDAR) cloud through the extrinsic onto the panorama.
// Pixels store Euclidean range; collisions keep the nearest return.
SparseProjection lidar_to_panorama(const LabeledPointCloud& cloud,
                                   const CalibrationExtrinsic& extrinsic,
                                   uint32_t height, uint32_t width);

// True iff the point is finite, has positive range, and its (x, y) lies
// inside the BEV perception window (half-open on the upper edges).
ValidMask mask_valid(const LabeledPointCloud& cloud, const BevGridSpec& grid);

// Drops points whose label is in `excluded`; requires labels.
LabeledPointCloud filter_classes(const LabeledPointCloud& cloud,
                                 const std::vector<uint8_t>& excluded);

}  // namespace panobev
