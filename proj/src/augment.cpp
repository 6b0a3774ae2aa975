#include "panobev/augment.hpp"

#include <cmath>

#include <json.hpp>

#include "panobev/errors.hpp"
#include "panobev/rng.hpp"

namespace panobev {

void AugmentSpec::validate() const {
  require(flip_probability >= 0.0 && flip_probability <= 1.0,
          ErrorCode::invalid_argument, "flip probability must be in [0, 1]");
  require(mix_lambda >= 0.0 && mix_lambda <= 1.0, ErrorCode::invalid_argument,
          "mix lambda must be in [0, 1]");
  require(std::isfinite(bev_rotation_rad), ErrorCode::invalid_argument,
          "bev rotation must be finite");
}

AugmentSpec AugmentSpec::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format,
         std::string("augment spec: invalid JSON: ") + e.what());
  }
  AugmentSpec spec;
  if (doc.contains("flip_probability"))
    spec.flip_probability = doc["flip_probability"].get<double>();
  if (doc.contains("mix_lambda"))
    spec.mix_lambda = doc["mix_lambda"].get<double>();
  if (doc.contains("bev_rotation_rad"))
    spec.bev_rotation_rad = doc["bev_rotation_rad"].get<double>();
  if (doc.contains("rotation_center")) {
    const auto& c = doc["rotation_center"];
    require(c.is_array() && c.size() == 2, ErrorCode::format,
            "augment spec: rotation_center must be [x, y]");
    spec.rotation_center_x = c[0].get<double>();
    spec.rotation_center_y = c[1].get<double>();
  }
  if (doc.contains("seed")) spec.seed = doc["seed"].get<uint64_t>();
  spec.validate();
  return spec;
}

namespace {

// Column remaps shared by the flip/roll family.
template <typename ColMap>
PanoramaImage remap_columns_rgb(const PanoramaImage& img, ColMap&& src_col) {
  PanoramaImage out(img.height, img.width);
  for (uint32_t r = 0; r < img.height; ++r)
    for (uint32_t c = 0; c < img.width; ++c) {
      uint32_t s = src_col(c);
      for (uint32_t ch = 0; ch < 3; ++ch)
        out.at(r, c, ch) = img.at(r, s, ch);
    }
  return out;
}

template <typename ColMap>
DepthPanorama remap_columns_depth(const DepthPanorama& img, ColMap&& src_col) {
  DepthPanorama out(img.height, img.width);
  for (uint32_t r = 0; r < img.height; ++r)
    for (uint32_t c = 0; c < img.width; ++c)
      out.at(r, c) = img.at(r, src_col(c));
  return out;
}

template <typename ColMap>
SemanticPanorama remap_columns_sem(const SemanticPanorama& img,
                                   ColMap&& src_col) {
  SemanticPanorama out(img.height, img.width);
  for (uint32_t r = 0; r < img.height; ++r)
    for (uint32_t c = 0; c < img.width; ++c)
      out.at(r, c) = img.at(r, src_col(c));
  return out;
}

struct MirrorPlain {
  uint32_t width;
  uint32_t operator()(uint32_t c) const { return width - 1 - c; }
};

struct MirrorSeam {
  uint32_t width;
  uint32_t operator()(uint32_t c) const {
    return (2 * width - 2 - c) % width;
  }
};

struct Roll {
  uint32_t width;
  int64_t cols;
  uint32_t operator()(uint32_t c) const {
    int64_t s = (static_cast<int64_t>(c) - cols) % width;
    if (s < 0) s += width;
    return static_cast<uint32_t>(s);
  }
};

}  // namespace

PanoramaImage pano_flip(const PanoramaImage& img) {
  return remap_columns_rgb(img, MirrorPlain{img.width});
}
DepthPanorama pano_flip(const DepthPanorama& img) {
  return remap_columns_depth(img, MirrorPlain{img.width});
}
SemanticPanorama pano_flip(const SemanticPanorama& img) {
  return remap_columns_sem(img, MirrorPlain{img.width});
}

PanoramaImage pano_flip_seam_aligned(const PanoramaImage& img) {
  return remap_columns_rgb(img, MirrorSeam{img.width});
}
DepthPanorama pano_flip_seam_aligned(const DepthPanorama& img) {
  return remap_columns_depth(img, MirrorSeam{img.width});
}
SemanticPanorama pano_flip_seam_aligned(const SemanticPanorama& img) {
  return remap_columns_sem(img, MirrorSeam{img.width});
}

PanoramaImage pano_roll(const PanoramaImage& img, int64_t cols) {
  return remap_columns_rgb(img, Roll{img.width, cols});
}
DepthPanorama pano_roll(const DepthPanorama& img, int64_t cols) {
  return remap_columns_depth(img, Roll{img.width, cols});
}
SemanticPanorama pano_roll(const SemanticPanorama& img, int64_t cols) {
  return remap_columns_sem(img, Roll{img.width, cols});
}

PanoramaImage pano_mix(const PanoramaImage& a, const PanoramaImage& b,
                       double lambda) {
  require(a.height == b.height && a.width == b.width,
          ErrorCode::invalid_argument, "pano_mix: dims must match");
  require(lambda >= 0.0 && lambda <= 1.0, ErrorCode::invalid_argument,
          "pano_mix: lambda must be in [0, 1]");
  PanoramaImage out(a.height, a.width);
  for (std::size_t i = 0; i < out.rgb.size(); ++i) {
    double v = lambda * a.rgb[i] + (1.0 - lambda) * b.rgb[i];
    out.rgb[i] = static_cast<uint8_t>(std::floor(v + 0.5));
  }
  return out;
}

SemanticBevMap bev_flip(const SemanticBevMap& map) {
  SemanticBevMap out(map.cells_x, map.cells_y);
  for (uint32_t row = 0; row < map.cells_y; ++row) {
    uint32_t src = map.cells_y - 1 - row;
    for (uint32_t col = 0; col < map.cells_x; ++col) {
      std::size_t o = out.offset(row, col);
      std::size_t i = map.offset(src, col);
      out.labels[o] = map.labels[i];
      out.mask[o] = map.mask[i];
      out.heights[o] = map.heights[i];
    }
  }
  return out;
}

SemanticBevMap bev_rotate(const SemanticBevMap& map, double theta,
                          double center_x, double center_y) {
  SemanticBevMap out(map.cells_x, map.cells_y);
  double ct = std::cos(theta);
  double st = std::sin(theta);
  for (uint32_t row = 0; row < map.cells_y; ++row) {
    for (uint32_t col = 0; col < map.cells_x; ++col) {
      double dx = col - center_x;
      double dy = row - center_y;
      // inverse warp: source = R(-theta) * (out - center) + center
      double sx = ct * dx + st * dy + center_x;
      double sy = -st * dx + ct * dy + center_y;
      int64_t sc = std::llround(sx);
      int64_t sr = std::llround(sy);
      if (sc < 0 || sr < 0 || sc >= static_cast<int64_t>(map.cells_x) ||
          sr >= static_cast<int64_t>(map.cells_y))
        continue;  // unobserved
      std::size_t o = out.offset(row, col);
      std::size_t i = map.offset(static_cast<uint32_t>(sr),
                                 static_cast<uint32_t>(sc));
      out.labels[o] = map.labels[i];
      out.mask[o] = map.mask[i];
      out.heights[o] = map.heights[i];
    }
  }
  return out;
}

SemanticBevMap bev_mix_mask(const SemanticBevMap& a, const SemanticBevMap& b,
                            double lambda, uint64_t seed) {
  require(a.cells_x == b.cells_x && a.cells_y == b.cells_y,
          ErrorCode::invalid_argument, "bev_mix_mask: dims must match");
  require(lambda >= 0.0 && lambda <= 1.0, ErrorCode::invalid_argument,
          "bev_mix_mask: lambda must be in [0, 1]");
  SemanticBevMap out(a.cells_x, a.cells_y);
  Rng rng(seed);
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    const SemanticBevMap& pick = rng.bernoulli(lambda) ? a : b;
    out.labels[i] = pick.labels[i];
    out.mask[i] = pick.mask[i];
    out.heights[i] = pick.heights[i];
  }
  return out;
}

Tensor bev_mix_prob(const Tensor& a, const Tensor& b, double lambda) {
  require(a.dtype() == DType::f32 && b.dtype() == DType::f32,
          ErrorCode::invalid_argument,
          "bev_mix_prob: needs probability volumes, not raw label grids");
  require(a.ndim() == 3 && a.same_shape(b), ErrorCode::invalid_argument,
          "bev_mix_prob: shapes must match (L x Y x X)");
  require(lambda >= 0.0 && lambda <= 1.0, ErrorCode::invalid_argument,
          "bev_mix_prob: lambda must be in [0, 1]");
  Tensor out = Tensor::of<float>(a.dims());
  auto va = a.as<float>();
  auto vb = b.as<float>();
  auto vo = out.as<float>();
  for (std::size_t i = 0; i < vo.size(); ++i)
    vo[i] = static_cast<float>(lambda * va[i] + (1.0 - lambda) * vb[i]);
  return out;
}

Tensor bev_to_onehot(const SemanticBevMap& map, uint32_t num_classes) {
  require(num_classes >= 1, ErrorCode::invalid_argument,
          "bev_to_onehot: need at least one class");
  Tensor out = Tensor::of<float>({num_classes, map.cells_y, map.cells_x});
  auto v = out.as<float>();
  std::size_t plane = map.cell_count();
  for (std::size_t i = 0; i < plane; ++i) {
    if (!map.mask[i]) continue;
    uint8_t label = map.labels[i];
    require(label < num_classes, ErrorCode::invalid_argument,
            "bev_to_onehot: label exceeds class count");
    v[label * plane + i] = 1.0f;
  }
  return out;
}

namespace {

struct Decisions {
  bool flipped = false;
  double theta = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  bool mix_applied = false;
  double mix_lambda = 1.0;
  uint64_t mix_seed = 0;
};

Sample apply_decisions(const Sample& sample, const Decisions& d,
                       const Sample* partner) {
  Sample out = sample;
  if (d.flipped) {
    if (out.rgb) out.rgb = pano_flip_seam_aligned(*out.rgb);
    if (out.depth) out.depth = pano_flip_seam_aligned(*out.depth);
    if (out.semantic) out.semantic = pano_flip_seam_aligned(*out.semantic);
    if (out.gt_bev) out.gt_bev = bev_flip(*out.gt_bev);
  }
  if (d.theta != 0.0 && out.gt_bev)
    out.gt_bev = bev_rotate(*out.gt_bev, d.theta, d.center_x, d.center_y);
  if (d.mix_applied && partner) {
    // depth and semantic panoramas are never blended; mixed depth has no
    // geometric meaning
    if (out.rgb && partner->rgb)
      out.rgb = pano_mix(*out.rgb, *partner->rgb, d.mix_lambda);
    if (out.gt_bev && partner->gt_bev)
      out.gt_bev =
          bev_mix_mask(*out.gt_bev, *partner->gt_bev, d.mix_lambda, d.mix_seed);
  }
  return out;
}

std::string decisions_json(const Decisions& d, uint64_t seed,
                           uint64_t sample_id) {
  nlohmann::json doc;
  doc["flipped"] = d.flipped;
  doc["bev_rotation_rad"] = d.theta;
  doc["rotation_center"] = {d.center_x, d.center_y};
  doc["mix_applied"] = d.mix_applied;
  doc["mix_lambda"] = d.mix_lambda;
  doc["mix_seed"] = d.mix_seed;
  doc["seed"] = seed;
  doc["sample_id"] = sample_id;
  return doc.dump(2) + "\n";
}

Decisions decisions_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format,
         std::string("augment metadata: invalid JSON: ") + e.what());
  }
  Decisions d;
  d.flipped = doc.at("flipped").get<bool>();
  d.theta = doc.at("bev_rotation_rad").get<double>();
  d.center_x = doc.at("rotation_center")[0].get<double>();
  d.center_y = doc.at("rotation_center")[1].get<double>();
  d.mix_applied = doc.at("mix_applied").get<bool>();
  d.mix_lambda = doc.at("mix_lambda").get<double>();
  d.mix_seed = doc.at("mix_seed").get<uint64_t>();
  return d;
}

}  // namespace

AugmentOutcome joint_augment(const Sample& sample, const AugmentSpec& spec,
                             uint64_t sample_id, const Sample* mix_partner) {
  spec.validate();
  Rng rng(Rng::derive(spec.seed, sample_id));
  Decisions d;
  d.flipped = spec.flip_probability > 0.0 && rng.bernoulli(spec.flip_probability);
  d.theta = spec.bev_rotation_rad;
  if (sample.gt_bev) {
    d.center_x = spec.rotation_center_x.value_or(
        (sample.gt_bev->cells_x - 1) / 2.0);
    d.center_y = spec.rotation_center_y.value_or(
        (sample.gt_bev->cells_y - 1) / 2.0);
  }
  d.mix_applied = mix_partner != nullptr && spec.mix_lambda < 1.0;
  d.mix_lambda = spec.mix_lambda;
  d.mix_seed = rng.next_u64();
  AugmentOutcome out;
  out.sample = apply_decisions(sample, d, mix_partner);
  out.metadata_json = decisions_json(d, spec.seed, sample_id);
  return out;
}

Sample replay_augment(const Sample& sample, const std::string& metadata_json,
                      const Sample* mix_partner) {
  return apply_decisions(sample, decisions_from_json(metadata_json),
                         mix_partner);
}

}  // namespace panobev
