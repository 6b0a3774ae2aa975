#include "panobev/scene.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "panobev/errors.hpp"
#include "panobev/spherical.hpp"
#include "panobev/threading.hpp"

namespace panobev {

void SceneSpec::validate() const {
  for (int i = 0; i < 3; ++i)
    require(room.min[i] < room.max[i], ErrorCode::format,
            "scene: room extents must be positive");
  require(num_classes >= 4 && num_classes <= 254, ErrorCode::format,
          "scene: class count must be in [4, 254]");
  require(room.strictly_contains(camera), ErrorCode::format,
          "scene: camera must be strictly inside the room");
  for (const SceneBox& b : boxes) {
    for (int i = 0; i < 3; ++i) {
      require(b.bounds.min[i] < b.bounds.max[i], ErrorCode::format,
              "scene: box extents must be positive");
      require(b.bounds.min[i] >= room.min[i] && b.bounds.max[i] <= room.max[i],
              ErrorCode::format, "scene: box must lie inside the room");
    }
    require(b.class_id < num_classes, ErrorCode::format,
            "scene: box class id exceeds class count");
    require(!b.bounds.contains(camera), ErrorCode::format,
            "scene: camera must be outside every box");
  }
}

namespace {

Vec3 json_vec3(const nlohmann::json& a, const char* what) {
  require(a.is_array() && a.size() == 3, ErrorCode::format,
          std::string("scene: ") + what + " must be a 3-array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

nlohmann::json vec3_json(const Vec3& v) {
  return nlohmann::json::array({v.x, v.y, v.z});
}

}  // namespace

SceneSpec SceneSpec::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format, std::string("scene: invalid JSON: ") + e.what());
  }
  require(doc.is_object() && doc.contains("room") && doc.contains("camera") &&
              doc.contains("classes"),
          ErrorCode::format, "scene: need room, camera and classes keys");
  SceneSpec s;
  s.room.min = json_vec3(doc["room"]["min"], "room.min");
  s.room.max = json_vec3(doc["room"]["max"], "room.max");
  s.camera = json_vec3(doc["camera"], "camera");
  s.num_classes = doc["classes"].get<uint32_t>();
  if (doc.contains("boxes")) {
    for (const auto& b : doc["boxes"]) {
      SceneBox box;
      box.bounds.min = json_vec3(b["min"], "box.min");
      box.bounds.max = json_vec3(b["max"], "box.max");
      box.class_id = static_cast<uint8_t>(b["class"].get<uint32_t>());
      s.boxes.push_back(box);
    }
  }
  s.validate();
  return s;
}

SceneSpec SceneSpec::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string SceneSpec::to_json() const {
  nlohmann::json doc;
  doc["room"]["min"] = vec3_json(room.min);
  doc["room"]["max"] = vec3_json(room.max);
  doc["camera"] = vec3_json(camera);
  doc["classes"] = num_classes;
  doc["boxes"] = nlohmann::json::array();
  for (const SceneBox& b : boxes) {
    nlohmann::json jb;
    jb["min"] = vec3_json(b.bounds.min);
    jb["max"] = vec3_json(b.bounds.max);
    jb["class"] = b.class_id;
    doc["boxes"].push_back(jb);
  }
  return doc.dump(2) + "\n";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exit distance of a ray starting inside the room, plus the face class.
RayHit room_exit(const Aabb& room, const Vec3& origin, const Vec3& dir) {
  double best = kInf;
  int axis = 0;
  bool to_max = true;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] == 0.0) continue;
    bool pos = dir[i] > 0.0;
    double bound = pos ? room.max[i] : room.min[i];
    double t = (bound - origin[i]) / dir[i];
    if (t < best) {
      best = t;
      axis = i;
      to_max = pos;
    }
  }
  uint8_t cls = SceneSpec::kWall;
  if (axis == 2) cls = to_max ? SceneSpec::kCeiling : SceneSpec::kFloor;
  return {best, cls};
}

// Entry distance of a ray into a box seen from outside; +inf on miss.
double box_entry(const Aabb& box, const Vec3& origin, const Vec3& dir) {
  double tmin = 0.0;
  double tmax = kInf;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] == 0.0) {
      if (origin[i] < box.min[i] || origin[i] > box.max[i]) return kInf;
      continue;
    }
    double inv = 1.0 / dir[i];
    double t0 = (box.min[i] - origin[i]) * inv;
    double t1 = (box.max[i] - origin[i]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > tmin) tmin = t0;
    if (t1 < tmax) tmax = t1;
    if (tmin > tmax) return kInf;
  }
  return tmin > 0.0 ? tmin : kInf;
}

uint8_t class_tint_bucket(uint8_t class_id, uint32_t salt) {
  return static_cast<uint8_t>(((class_id + 1u) * salt) % 10u);
}

}  // namespace

RayHit cast_scene_ray(const SceneSpec& scene, const Vec3& direction) {
  double n = direction.norm();
  require(n > 0.0 && direction.finite(), ErrorCode::invalid_argument,
          "cast_scene_ray: bad direction");
  Vec3 dir = direction * (1.0 / n);
  RayHit hit = room_exit(scene.room, scene.camera, dir);
  for (const SceneBox& b : scene.boxes) {
    double t = box_entry(b.bounds, scene.camera, dir);
    if (t < hit.range) hit = {t, b.class_id};
  }
  return hit;
}

RenderedPanorama render_panorama(const SceneSpec& scene, uint32_t height,
                                 uint32_t width) {
  scene.validate();
  require(height >= 2 && width >= 2, ErrorCode::invalid_argument,
          "render_panorama: need at least 2x2 pixels");
  RenderedPanorama out{PanoramaImage(height, width),
                       DepthPanorama(height, width),
                       SemanticPanorama(height, width)};
  parallel_for(height, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      for (uint32_t c = 0; c < width; ++c) {
        PixelIndex pix{static_cast<int32_t>(r), static_cast<int32_t>(c)};
        Vec3 dir = sph_to_cart(pixel_to_sph(pix, height, width), 1.0);
        RayHit hit = cast_scene_ray(scene, dir);
        out.depth.at(pix.row, pix.col) = static_cast<float>(hit.range);
        out.semantic.at(pix.row, pix.col) = hit.class_id;
        // Depth-driven shade with a mild class tint keeps the image
        // smooth across face boundaries (depth is continuous there).
        double shade = 40.0 + 215.0 * std::exp(-hit.range / 8.0);
        const uint32_t salts[3] = {37u, 61u, 89u};
        for (uint32_t ch = 0; ch < 3; ++ch) {
          double tint =
              1.0 - 0.08 * class_tint_bucket(hit.class_id, salts[ch]) / 9.0;
          out.rgb.at(pix.row, pix.col, ch) =
              static_cast<uint8_t>(std::lround(shade * tint));
        }
      }
    }
  });
  return out;
}

// Heights here are world z (the floor plane and box tops as authored in
// the scene); rasterized maps carry sensor-frame point heights instead.
SemanticBevMap ground_truth_bev(const SceneSpec& scene,
                                const BevGridSpec& grid) {
  scene.validate();
  grid.validate();
  SemanticBevMap map(grid.cells_x, grid.cells_y);
  double floor_z = scene.room.min.z;
  for (uint32_t row = 0; row < grid.cells_y; ++row) {
    double y = -grid.range_y / 2.0 + (row + 0.5) * grid.res_y();
    double wy = y + scene.camera.y;
    for (uint32_t col = 0; col < grid.cells_x; ++col) {
      double x = -grid.range_x / 2.0 + (col + 0.5) * grid.res_x();
      double wx = x + scene.camera.x;
      if (wx < scene.room.min.x || wx >= scene.room.max.x ||
          wy < scene.room.min.y || wy >= scene.room.max.y)
        continue;  // no surface below this cell
      uint8_t label = SceneSpec::kFloor;
      double top = floor_z;
      for (const SceneBox& b : scene.boxes) {
        if (wx < b.bounds.min.x || wx >= b.bounds.max.x ||
            wy < b.bounds.min.y || wy >= b.bounds.max.y)
          continue;
        if (b.bounds.max.z > top) {
          top = b.bounds.max.z;
          label = b.class_id;
        }
      }
      map.set(row, col, label, static_cast<float>(top));
    }
  }
  return map;
}

LabeledPointCloud sparse_lidar_sample(const SceneSpec& scene,
                                      uint32_t n_azimuth,
                                      uint32_t n_elevation,
                                      double elevation_min,
                                      double elevation_max) {
  scene.validate();
  require(n_azimuth >= 1 && n_elevation >= 1, ErrorCode::invalid_argument,
          "sparse_lidar_sample: lattice counts must be >= 1");
  require(elevation_min < elevation_max && elevation_min > -M_PI / 2 &&
              elevation_max < M_PI / 2,
          ErrorCode::invalid_argument,
          "sparse_lidar_sample: elevation span must lie in (-pi/2, pi/2)");
  LabeledPointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(n_azimuth) * n_elevation);
  for (uint32_t j = 0; j < n_elevation; ++j) {
    double elevation =
        elevation_min +
        (j + 0.5) * (elevation_max - elevation_min) / n_elevation;
    double theta = M_PI / 2.0 - elevation;
    for (uint32_t k = 0; k < n_azimuth; ++k) {
      double phi = (k + 0.5) * 2.0 * M_PI / n_azimuth;
      SphericalAngle a{phi > M_PI ? phi - 2.0 * M_PI : phi, theta};
      Vec3 dir = sph_to_cart(a, 1.0);
      RayHit hit = cast_scene_ray(scene, dir);
      cloud.points.push_back(dir * hit.range);
      cloud.labels.push_back(hit.class_id);
    }
  }
  return cloud;
}

}  // namespace panobev
