#include "panobev/projection.hpp"

#include <cmath>

#include "panobev/bev.hpp"
#include "panobev/errors.hpp"
#include "panobev/spherical.hpp"

namespace panobev {

LabeledPointCloud depth_to_points(const DepthPanorama& depth,
                                  const SemanticPanorama* semantic) {
  if (semantic) {
    require(semantic->height == depth.height && semantic->width == depth.width,
            ErrorCode::invalid_argument,
            "depth_to_points: semantic dims must match depth dims");
  }
  LabeledPointCloud cloud;
  cloud.points.reserve(depth.valid_count());
  for (uint32_t r = 0; r < depth.height; ++r) {
    for (uint32_t c = 0; c < depth.width; ++c) {
      float d = depth.at(r, c);
      if (!(d > 0.0f)) continue;
      SphericalAngle a = pixel_to_sph({static_cast<int32_t>(r),
                                       static_cast<int32_t>(c)},
                                      depth.height, depth.width);
      cloud.points.push_back(sph_to_cart(a, d));
      cloud.source_pixel.push_back(r * depth.width + c);
      if (semantic) cloud.labels.push_back(semantic->at(r, c));
    }
  }
  return cloud;
}

LabeledPointCloud transform_points(const LabeledPointCloud& cloud,
                                   const CalibrationExtrinsic& extrinsic) {
  LabeledPointCloud out = cloud;
  for (Vec3& p : out.points) p = extrinsic.apply(p);
  return out;
}

SparseProjection lidar_to_panorama(const LabeledPointCloud& cloud,
                                   const CalibrationExtrinsic& extrinsic,
                                   uint32_t height, uint32_t width) {
  require(height >= 2 && width >= 2, ErrorCode::invalid_argument,
          "lidar_to_panorama: panorama must be at least 2x2");
  SparseProjection out;
  out.depth = DepthPanorama(height, width);
  out.has_labels = cloud.has_labels();
  if (out.has_labels) out.labels = SemanticPanorama(height, width);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Vec3 p = extrinsic.apply(cloud.points[i]);
    double range = p.norm();
    if (!(range > 0.0) || !p.finite()) {
      ++out.skipped;
      continue;
    }
    PixelIndex pix = sph_to_pixel(cart_to_sph(p), height, width);
    float r32 = static_cast<float>(range);
    float& slot = out.depth.at(pix.row, pix.col);
    if (slot > 0.0f && slot <= r32) continue;  // nearest return wins
    slot = r32;
    if (out.has_labels) out.labels.at(pix.row, pix.col) = cloud.labels[i];
  }
  return out;
}

ValidMask mask_valid(const LabeledPointCloud& cloud, const BevGridSpec& grid) {
  grid.validate();
  ValidMask mask(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (!p.finite() || !(p.norm() > 0.0)) continue;
    mask[i] = grid_index(p.x, p.y, grid).has_value() ? 1 : 0;
  }
  return mask;
}

LabeledPointCloud filter_classes(const LabeledPointCloud& cloud,
                                 const std::vector<uint8_t>& excluded) {
  require(cloud.has_labels(), ErrorCode::invalid_argument,
          "filter_classes: cloud has no labels");
  auto is_excluded = [&](uint8_t l) {
    for (uint8_t e : excluded)
      if (e == l) return true;
    return false;
  };
  LabeledPointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (is_excluded(cloud.labels[i])) continue;
    out.points.push_back(cloud.points[i]);
    out.labels.push_back(cloud.labels[i]);
    if (cloud.has_source_pixels())
      out.source_pixel.push_back(cloud.source_pixel[i]);
  }
  return out;
}

}  // namespace panobev
