#include <doctest.h>

#include <cmath>

#include "panobev/augment.hpp"
#include "panobev/bev.hpp"
#include "panobev/errors.hpp"
#include "panobev/projection.hpp"
#include "panobev/rng.hpp"
#include "panobev/scene.hpp"
#include "panobev/spherical.hpp"

#include "test_util.hpp"

using namespace panobev;

namespace {

PanoramaImage row_image(const std::vector<uint8_t>& values) {
  PanoramaImage img(1, static_cast<uint32_t>(values.size()));
  for (uint32_t c = 0; c < img.width; ++c)
    for (uint32_t ch = 0; ch < 3; ++ch) img.at(0, c, ch) = values[c];
  return img;
}

std::vector<uint8_t> first_channel_row(const PanoramaImage& img) {
  std::vector<uint8_t> out(img.width);
  for (uint32_t c = 0; c < img.width; ++c) out[c] = img.at(0, c, 0);
  return out;
}

}  // namespace

TEST_CASE("pano_flip mirrors a row") {
  PanoramaImage img = row_image({10, 20, 30});
  CHECK(first_channel_row(pano_flip(img)) ==
        std::vector<uint8_t>{30, 20, 10});
}

TEST_CASE("flips are involutions") {
  SceneSpec scene = testutil::make_random_scene(51);
  RenderedPanorama r = render_panorama(scene, 16, 32);
  CHECK(pano_flip(pano_flip(r.rgb)).rgb == r.rgb.rgb);
  CHECK(pano_flip_seam_aligned(pano_flip_seam_aligned(r.rgb)).rgb ==
        r.rgb.rgb);
  CHECK(pano_flip(pano_flip(r.depth)).meters == r.depth.meters);
  SemanticBevMap gt = ground_truth_bev(scene, BevGridSpec{60, 60, 10, 10});
  SemanticBevMap back = bev_flip(bev_flip(gt));
  CHECK(back.labels == gt.labels);
  CHECK(back.mask == gt.mask);
  CHECK(back.heights == gt.heights);
}

TEST_CASE("flip azimuth correspondence on the pixel-center grid") {
  const uint32_t w = 64;
  const double pitch = 2.0 * M_PI / w;
  for (uint32_t c = 0; c < w; ++c) {
    double phi = pixel_to_sph({0, static_cast<int32_t>(c)}, 4, w)
                     .azimuth_0_2pi();
    // plain mirror: content azimuth is offset from 2pi - phi by one pitch
    uint32_t plain_src = w - 1 - c;
    double phi_plain = pixel_to_sph({0, static_cast<int32_t>(plain_src)}, 4, w)
                           .azimuth_0_2pi();
    double sum = std::fmod(phi + phi_plain, 2.0 * M_PI);
    CHECK(sum == doctest::Approx(pitch).epsilon(1e-9));
    // seam-aligned mirror: content comes exactly from 2pi - phi (mod 2pi)
    uint32_t seam_src = (2 * w - 2 - c) % w;
    double phi_seam = pixel_to_sph({0, static_cast<int32_t>(seam_src)}, 4, w)
                          .azimuth_0_2pi();
    double target = std::fmod(2.0 * M_PI - phi, 2.0 * M_PI);
    CHECK(phi_seam == doctest::Approx(target).epsilon(1e-9));
  }
}

TEST_CASE("pano_roll shifts columns cyclically") {
  PanoramaImage img = row_image({1, 2, 3, 4});
  CHECK(first_channel_row(pano_roll(img, 1)) ==
        std::vector<uint8_t>{4, 1, 2, 3});
  CHECK(first_channel_row(pano_roll(img, -1)) ==
        std::vector<uint8_t>{2, 3, 4, 1});
  CHECK(pano_roll(pano_roll(img, 3), -3).rgb == img.rgb);
}

TEST_CASE("pano_mix blends and projects") {
  PanoramaImage a = row_image({100, 100, 100});
  PanoramaImage b = row_image({200, 200, 200});
  CHECK(pano_mix(a, b, 1.0).rgb == a.rgb);
  CHECK(pano_mix(a, b, 0.0).rgb == b.rgb);
  PanoramaImage mixed = pano_mix(a, b, 0.25);
  CHECK(mixed.at(0, 0, 0) == 175);  // 0.25*100 + 0.75*200
  CHECK(pano_mix(a, b, 0.5).rgb == pano_mix(b, a, 0.5).rgb);
  PanoramaImage small(1, 2);
  CHECK_THROWS_AS(pano_mix(a, small, 0.5), Error);
}

TEST_CASE("bev_flip mirrors rows with all channels") {
  SemanticBevMap map(3, 2);  // 3 cols, 2 rows
  map.set(0, 1, 4, 0.5f);
  SemanticBevMap out = bev_flip(map);
  CHECK(out.observed(1, 1));
  CHECK_FALSE(out.observed(0, 1));
  CHECK(out.labels[out.offset(1, 1)] == 4);
  CHECK(out.heights[out.offset(1, 1)] == 0.5f);
}

TEST_CASE("bev_rotate identity and quarter turn") {
  SemanticBevMap map(500, 500);
  map.set(250, 260, 7, 1.0f);  // (x=260, y=250)
  SemanticBevMap same = bev_rotate(map, 0.0, 250.0, 250.0);
  CHECK(same.labels == map.labels);

  SemanticBevMap turned = bev_rotate(map, M_PI / 2, 250.0, 250.0);
  // appendix rotation maps (x=260, y=250) -> (x=250, y=260)
  CHECK(turned.observed(260, 250));
  CHECK(turned.labels[turned.offset(260, 250)] == 7);
  CHECK(turned.observed_count() == 1);
}

TEST_CASE("bev_rotate sends out-of-window content to unobserved") {
  SemanticBevMap map(10, 10);
  for (uint32_t r = 0; r < 10; ++r)
    for (uint32_t c = 0; c < 10; ++c) map.set(r, c, 1, 0.0f);
  SemanticBevMap out = bev_rotate(map, M_PI / 4, 4.5, 4.5);
  CHECK(out.observed_count() < map.observed_count());
  CHECK(out.observed_count() > 0);
}

TEST_CASE("quarter turns about the grid center permute observed cells") {
  SceneSpec scene = testutil::make_random_scene(57);
  SemanticBevMap gt = ground_truth_bev(scene, BevGridSpec{120, 120, 10, 10});
  // a square grid maps onto itself under 90 degrees about its center,
  // so the only allowed loss is out-of-window, which is empty here
  SemanticBevMap turned = bev_rotate(gt, M_PI / 2, 59.5, 59.5);
  CHECK(turned.observed_count() == gt.observed_count());
}

TEST_CASE("bev_rotate round trip restores block maps almost everywhere") {
  SceneSpec scene = testutil::make_random_scene(52);
  SemanticBevMap gt = ground_truth_bev(scene, BevGridSpec{250, 250, 10, 10});
  double theta = 30.0 * M_PI / 180.0;
  SemanticBevMap there = bev_rotate(gt, theta, 124.5, 124.5);
  SemanticBevMap back = bev_rotate(there, -theta, 124.5, 124.5);
  std::size_t survivors = 0, restored = 0;
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    if (!gt.mask[i] || !back.mask[i]) continue;
    ++survivors;
    restored += back.labels[i] == gt.labels[i];
  }
  REQUIRE(survivors > 1000);
  CHECK(static_cast<double>(restored) / survivors >= 0.99);
}

TEST_CASE("bev mixing laws") {
  SceneSpec scene = testutil::make_random_scene(53);
  SemanticBevMap a = ground_truth_bev(scene, BevGridSpec{80, 80, 10, 10});
  SemanticBevMap b = bev_flip(a);

  SUBCASE("lambda 1 and 0 are projections") {
    SemanticBevMap keep = bev_mix_mask(a, b, 1.0, 5);
    CHECK(keep.labels == a.labels);
    SemanticBevMap other = bev_mix_mask(a, b, 0.0, 5);
    CHECK(other.labels == b.labels);
  }
  SUBCASE("probability mixing blends one-hot volumes") {
    Tensor pa = bev_to_onehot(a, 10);
    Tensor pb = bev_to_onehot(b, 10);
    Tensor mixed = bev_mix_prob(pa, pb, 0.5);
    auto va = pa.as<float>();
    auto vb = pb.as<float>();
    auto vm = mixed.as<float>();
    for (std::size_t i = 0; i < vm.size(); ++i)
      CHECK(vm[i] == doctest::Approx(0.5f * (va[i] + vb[i])));
    CHECK(bev_mix_prob(pa, pb, 1.0).as<float>()[0] == va[0]);
  }
  SUBCASE("probability mode rejects raw label grids") {
    Tensor labels_a = a.labels_tensor();
    Tensor labels_b = b.labels_tensor();
    CHECK_THROWS_AS(bev_mix_prob(labels_a, labels_b, 0.5), Error);
  }
  SUBCASE("mask-mode selection fraction tracks lambda") {
    SemanticBevMap big_a(500, 500);
    SemanticBevMap big_b(500, 500);
    for (uint32_t r = 0; r < 500; ++r)
      for (uint32_t c = 0; c < 500; ++c) {
        big_a.set(r, c, 1, 0.0f);
        big_b.set(r, c, 2, 0.0f);
      }
    SemanticBevMap mixed = bev_mix_mask(big_a, big_b, 0.5, 99);
    double from_a = 0.0;
    for (uint8_t l : mixed.labels) from_a += l == 1;
    from_a /= mixed.labels.size();
    CHECK(std::abs(from_a - 0.5) <= 0.02);
    // deterministic per seed
    SemanticBevMap again = bev_mix_mask(big_a, big_b, 0.5, 99);
    CHECK(again.labels == mixed.labels);
  }
}

TEST_CASE("joint_augment with p=0 and no rotation is the identity") {
  SceneSpec scene = testutil::make_random_scene(54);
  RenderedPanorama r = render_panorama(scene, 32, 64);
  Sample sample;
  sample.rgb = r.rgb;
  sample.depth = r.depth;
  sample.semantic = r.semantic;
  sample.gt_bev = ground_truth_bev(scene, BevGridSpec{50, 50, 10, 10});
  AugmentSpec spec;
  spec.flip_probability = 0.0;
  AugmentOutcome out = joint_augment(sample, spec);
  CHECK(out.sample.rgb->rgb == r.rgb.rgb);
  CHECK(out.sample.depth->meters == r.depth.meters);
  CHECK(out.sample.gt_bev->labels == sample.gt_bev->labels);
}

TEST_CASE("joint_augment is deterministic and replayable") {
  SceneSpec scene = testutil::make_random_scene(55);
  RenderedPanorama r = render_panorama(scene, 32, 64);
  Sample sample;
  sample.rgb = r.rgb;
  sample.depth = r.depth;
  sample.gt_bev = ground_truth_bev(scene, BevGridSpec{50, 50, 10, 10});
  AugmentSpec spec;
  spec.flip_probability = 1.0;
  spec.bev_rotation_rad = 0.3;
  spec.seed = 17;
  AugmentOutcome first = joint_augment(sample, spec, 3);
  AugmentOutcome second = joint_augment(sample, spec, 3);
  CHECK(first.metadata_json == second.metadata_json);
  CHECK(first.sample.rgb->rgb == second.sample.rgb->rgb);
  Sample replay = replay_augment(sample, first.metadata_json);
  CHECK(replay.rgb->rgb == first.sample.rgb->rgb);
  CHECK(replay.gt_bev->labels == first.sample.gt_bev->labels);
  // a different sample id draws a different stream
  AugmentSpec half = spec;
  half.flip_probability = 0.5;
  int flips = 0;
  for (uint64_t id = 0; id < 32; ++id) {
    AugmentOutcome o = joint_augment(sample, half, id);
    flips += o.metadata_json.find("\"flipped\": true") != std::string::npos;
  }
  CHECK(flips > 2);
  CHECK(flips < 30);
}

TEST_CASE("flip commutes with the geometry pipeline cell for cell") {
  SceneSpec scene = testutil::make_random_scene(56);
  RenderedPanorama r = render_panorama(scene, 256, 512);
  // odd cell count: the mirror axis y=0 falls on a cell center, so the
  // panorama columns looking exactly along the axis stay fixed under
  // both mirrors (an even count puts them on a cell boundary)
  BevGridSpec grid{251, 251, 10.0, 10.0};

  auto to_bev = [&](const DepthPanorama& depth, const SemanticPanorama& sem) {
    LabeledPointCloud cloud = depth_to_points(depth, &sem);
    cloud = filter_classes(cloud, {SceneSpec::kCeiling, SceneSpec::kWall});
    return rasterize_bev(cloud, grid);
  };

  SemanticBevMap straight = to_bev(r.depth, r.semantic);
  SemanticBevMap flipped = to_bev(pano_flip_seam_aligned(r.depth),
                                  pano_flip_seam_aligned(r.semantic));
  SemanticBevMap mirrored = bev_flip(straight);
  CHECK(flipped.labels == mirrored.labels);
  CHECK(flipped.mask == mirrored.mask);
  CHECK(flipped.heights == mirrored.heights);
}
