#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panobev/bev.hpp"
#include "panobev/geometry.hpp"
#include "panobev/image.hpp"
#include "panobev/projection.hpp"

namespace panobev {

struct Aabb {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
  bool strictly_contains(const Vec3& p) const {
    return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y &&
           p.z > min.z && p.z < max.z;
  }
};

struct SceneBox {
  Aabb bounds;  // world coordinates, meters
  uint8_t class_id = 0;
};

// Analytic box-room scene: an axis-aligned room observed from a camera
// pose, with axis-aligned boxes inside. Serves as the ground-truth
// oracle for the projection/rasterization pipeline.
//
// Reserved classes: 0 void, 1 floor, 2 ceiling, 3 wall; scene boxes use
// ids in [4, num_classes).
struct SceneSpec {
  static constexpr uint8_t kVoid = 0;
  static constexpr uint8_t kFloor = 1;
  static constexpr uint8_t kCeiling = 2;
  static constexpr uint8_t kWall = 3;

  Aabb room;
  std::vector<SceneBox> boxes;
  Vec3 camera;  // world coordinates; camera frame is world minus this
  uint32_t num_classes = 4;

  void validate() const;

  static SceneSpec from_json(const std::string& text);
  static SceneSpec load(const std::string& path);
  std::string to_json() const;
};

struct RayHit {
  double range = 0.0;   // Euclidean distance along the unit ray
  uint8_t class_id = SceneSpec::kVoid;
};

// Nearest surface along a camera-frame direction (need not be unit
// length; range is reported for the normalized direction). The camera
// sits inside a closed room, so every ray hits.
RayHit cast_scene_ray(const SceneSpec& scene, const Vec3& direction);

struct RenderedPanorama {
  PanoramaImage rgb;
  DepthPanorama depth;       // Euclidean range, meters
  SemanticPanorama semantic;
};

// Ray-casts one panorama pixel grid: per pixel the nearest hit gives
// range and class; RGB is a depth-shaded, class-tinted rendering that
// stays smooth within and across room faces.
RenderedPanorama render_panorama(const SceneSpec& scene, uint32_t height,
                                 uint32_t width);

// Analytic top-down ground truth at cell centers: the highest of box top
// vs floor, heights in the camera frame. Cells whose center falls
// outside the room footprint stay unobserved.
SemanticBevMap ground_truth_bev(const SceneSpec& scene,
                                const BevGridSpec& grid);

// Regular angular lattice of LiDAR-like returns; elevation is measured
// from the horizon (theta = pi/2 - elevation). Points in camera frame,
// labeled by the surface class they hit.
LabeledPointCloud sparse_lidar_sample(const SceneSpec& scene,
                                      uint32_t n_azimuth,
                                      uint32_t n_elevation,
                                      double elevation_min,
                                      double elevation_max);

}  // namespace panobev
