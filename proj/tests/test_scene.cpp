#include <doctest.h>

#include <cmath>
#include <cstring>

#include "panobev/errors.hpp"
#include "panobev/rng.hpp"
#include "panobev/scene.hpp"
#include "panobev/spherical.hpp"

#include "test_util.hpp"

using namespace panobev;

namespace {

SceneSpec empty_room_4x4x3() {
  SceneSpec s;
  s.room.min = {-2, -2, 0};
  s.room.max = {2, 2, 3};
  s.camera = {0, 0, 1.5};
  s.num_classes = 6;
  return s;
}

}  // namespace

TEST_CASE("scene validation rejects bad configurations") {
  SceneSpec s = empty_room_4x4x3();
  CHECK_NOTHROW(s.validate());

  SceneSpec outside = s;
  outside.camera = {3, 0, 1.5};
  CHECK_THROWS_AS(outside.validate(), Error);

  SceneSpec in_box = s;
  in_box.boxes.push_back({{{-1, -1, 0}, {1, 1, 2}}, 4});
  CHECK_THROWS_AS(in_box.validate(), Error);  // camera inside the box

  SceneSpec box_outside = s;
  box_outside.boxes.push_back({{{1, 1, 0}, {3, 2, 1}}, 4});
  CHECK_THROWS_AS(box_outside.validate(), Error);

  SceneSpec bad_class = s;
  bad_class.boxes.push_back({{{1, 1, 0}, {1.5, 1.5, 1}}, 9});
  CHECK_THROWS_AS(bad_class.validate(), Error);
}

TEST_CASE("scene json round trip") {
  SceneSpec s = empty_room_4x4x3();
  s.boxes.push_back({{{0.5, 0.5, 0}, {1.5, 1.2, 0.8}}, 4});
  SceneSpec r = SceneSpec::from_json(s.to_json());
  CHECK(r.camera.z == s.camera.z);
  CHECK(r.boxes.size() == 1);
  CHECK(r.boxes[0].class_id == 4);
  CHECK_THROWS_AS(SceneSpec::from_json("{not json"), Error);
  CHECK_THROWS_AS(SceneSpec::from_json("{\"room\": 1}"), Error);
}

TEST_CASE("equator ray hits the wall at the analytic distance") {
  SceneSpec s = empty_room_4x4x3();
  RenderedPanorama r = render_panorama(s, 128, 256);
  // the pixel looking closest to straight +x
  PixelIndex front = sph_to_pixel({0.0, M_PI / 2}, 128, 256);
  double theta = pixel_to_sph(front, 128, 256).theta;
  double expected = 2.0 / std::sin(theta);  // wall plane x = 2
  CHECK(r.depth.at(front.row, front.col) ==
        doctest::Approx(expected).epsilon(1e-6));
  CHECK(r.depth.at(front.row, front.col) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r.semantic.at(front.row, front.col) == SceneSpec::kWall);
}

TEST_CASE("zenith and nadir pixels see ceiling and floor") {
  SceneSpec s = empty_room_4x4x3();
  RenderedPanorama r = render_panorama(s, 64, 128);
  CHECK(r.semantic.at(0, 10) == SceneSpec::kCeiling);
  CHECK(r.depth.at(0, 10) == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(r.semantic.at(63, 10) == SceneSpec::kFloor);
  CHECK(r.depth.at(63, 10) == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("a box occludes the wall behind it") {
  SceneSpec s = empty_room_4x4x3();
  s.boxes.push_back({{{1.0, -0.4, 0.8}, {1.4, 0.4, 2.2}}, 4});
  RenderedPanorama r = render_panorama(s, 128, 256);
  PixelIndex front = sph_to_pixel({0.0, M_PI / 2}, 128, 256);
  CHECK(r.semantic.at(front.row, front.col) == 4);
  CHECK(r.depth.at(front.row, front.col) < 2.0);
  CHECK(r.depth.at(front.row, front.col) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("rendered depth matches an independent ray oracle") {
  SceneSpec s = testutil::make_random_scene(61);
  RenderedPanorama r = render_panorama(s, 64, 128);
  Rng rng(62);
  for (int i = 0; i < 500; ++i) {
    int32_t row = static_cast<int32_t>(rng.below(64));
    int32_t col = static_cast<int32_t>(rng.below(128));
    Vec3 dir = sph_to_cart(pixel_to_sph({row, col}, 64, 128), 1.0);
    double expected = testutil::ray_oracle(s, dir);
    CHECK(std::abs(r.depth.at(row, col) - expected) <= 1e-6 * expected + 1e-6);
  }
}

TEST_CASE("render is deterministic bit for bit") {
  SceneSpec s = testutil::make_random_scene(63);
  RenderedPanorama a = render_panorama(s, 64, 128);
  RenderedPanorama b = render_panorama(s, 64, 128);
  CHECK(a.rgb.rgb == b.rgb.rgb);
  CHECK(std::memcmp(a.depth.meters.data(), b.depth.meters.data(),
                    a.depth.meters.size() * sizeof(float)) == 0);
  CHECK(a.semantic.labels == b.semantic.labels);
}

TEST_CASE("ground truth of an empty room is floor at height zero") {
  SceneSpec s = empty_room_4x4x3();
  BevGridSpec grid{40, 40, 4.0, 4.0};  // window equals the room footprint
  SemanticBevMap gt = ground_truth_bev(s, grid);
  CHECK(gt.observed_count() == 40u * 40u);
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    CHECK(gt.labels[i] == SceneSpec::kFloor);
    CHECK(gt.heights[i] == 0.0f);
  }
}

TEST_CASE("box footprint covers the expected cell count with heights") {
  SceneSpec s = empty_room_4x4x3();
  s.room.min = {-8, -8, 0};
  s.room.max = {8, 8, 3};
  s.boxes.push_back({{{0.513, 0.527, 0.0}, {1.513, 1.527, 0.883}}, 4});
  BevGridSpec grid{500, 500, 10.0, 10.0};
  SemanticBevMap gt = ground_truth_bev(s, grid);
  std::size_t box_cells = 0;
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    if (gt.labels[i] != 4) continue;
    ++box_cells;
    CHECK(gt.heights[i] == doctest::Approx(0.883));
  }
  // 1m x 1m footprint at 0.02m cells: 50x50 give or take a boundary ring
  CHECK(box_cells >= 49u * 49u);
  CHECK(box_cells <= 51u * 51u);
}

TEST_CASE("stacked footprints pick the taller box") {
  SceneSpec s = empty_room_4x4x3();
  s.boxes.push_back({{{0.5, -0.5, 0.0}, {1.5, 0.5, 0.6}}, 4});
  s.boxes.push_back({{{0.8, -0.2, 0.0}, {1.2, 0.2, 1.4}}, 5});
  BevGridSpec grid{100, 100, 4.0, 4.0};
  SemanticBevMap gt = ground_truth_bev(s, grid);
  auto cell = grid_index(1.0, 0.0, grid);
  REQUIRE(cell.has_value());
  CHECK(gt.labels[gt.offset(cell->row, cell->col)] == 5);
  CHECK(gt.heights[gt.offset(cell->row, cell->col)] == doctest::Approx(1.4));
}

TEST_CASE("gt cells outside the room stay unobserved") {
  SceneSpec s = empty_room_4x4x3();  // 4m room inside a 10m window
  BevGridSpec grid{100, 100, 10.0, 10.0};
  SemanticBevMap gt = ground_truth_bev(s, grid);
  CHECK(gt.observed_count() < 100u * 100u);
  auto outside = grid_index(4.0, 4.0, grid);
  REQUIRE(outside.has_value());
  CHECK_FALSE(gt.observed(outside->row, outside->col));
}

TEST_CASE("sparse lidar lattice hits every ray in a closed room") {
  SceneSpec s = testutil::make_random_scene(64);
  LabeledPointCloud c = sparse_lidar_sample(s, 64, 16, -1.2, 0.6);
  CHECK(c.size() == 64u * 16u);
  REQUIRE(c.has_labels());
  double worst = 0.0;
  for (const Vec3& p : c.points) {
    Vec3 world = p + s.camera;
    worst = std::max(worst, testutil::surface_distance_oracle(s, world));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("sparse lattice projects to far fewer pixels than a dense render") {
  SceneSpec s = testutil::make_random_scene(65);
  LabeledPointCloud c = sparse_lidar_sample(s, 64, 16, -1.2, 0.6);
  SparseProjection sp =
      lidar_to_panorama(c, CalibrationExtrinsic::identity(), 512, 1024);
  CHECK(sp.depth.valid_count() <= 1024);
  CHECK(sp.depth.valid_count() > 0);
}

TEST_CASE("lidar elevation span is validated") {
  SceneSpec s = empty_room_4x4x3();
  CHECK_THROWS_AS(sparse_lidar_sample(s, 8, 4, 0.5, 0.5), Error);
  CHECK_THROWS_AS(sparse_lidar_sample(s, 0, 4, -0.5, 0.5), Error);
  CHECK_THROWS_AS(sparse_lidar_sample(s, 8, 4, -2.0, 0.5), Error);
}
