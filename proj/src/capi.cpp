#include "panobev.h"

#include <cstring>
#include <string>

#include "panobev/attention.hpp"
#include "panobev/augment.hpp"
#include "panobev/bev.hpp"
#include "panobev/calibration.hpp"
#include "panobev/errors.hpp"
#include "panobev/io.hpp"
#include "panobev/scene.hpp"
#include "panobev/spherical.hpp"
#include "panobev/version.hpp"

using namespace panobev;

struct pbv_tensor { Tensor t; };
struct pbv_cloud { LabeledPointCloud c; };
struct pbv_calibration { CalibrationExtrinsic e; };
struct pbv_scene { SceneSpec s; };
struct pbv_bev { SemanticBevMap m; };
struct pbv_attention { LinearParams p; };

namespace {

thread_local std::string g_last_error;

pbv_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::format: return PBV_ERROR_FORMAT;
    case ErrorCode::io: return PBV_ERROR_IO;
    case ErrorCode::calibration: return PBV_ERROR_CALIBRATION;
    case ErrorCode::threshold: return PBV_ERROR_THRESHOLD;
    case ErrorCode::invalid_argument: return PBV_ERROR_INVALID;
  }
  return PBV_ERROR_INTERNAL;
}

template <typename Fn>
pbv_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PBV_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PBV_ERROR_INTERNAL;
  }
}

void need(bool cond, const char* what) {
  require(cond, ErrorCode::invalid_argument, what);
}

BevGridSpec to_grid(const pbv_grid_spec* g) {
  need(g != nullptr, "grid spec is required");
  BevGridSpec spec{g->cells_x, g->cells_y, g->range_x, g->range_y};
  spec.validate();
  return spec;
}

DepthPanorama depth_from_handle(const pbv_tensor* t) {
  need(t != nullptr, "depth tensor is required");
  return DepthPanorama::from_tensor(t->t);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* pbv_version(void) { return kVersion; }

const char* pbv_last_error(void) { return g_last_error.c_str(); }

void pbv_string_free(char* s) { delete[] s; }

/* ---- tensors ------------------------------------------------------ */

pbv_status pbv_tensor_create(pbv_dtype dtype, const uint32_t* dims,
                             uint32_t ndim, const void* data,
                             pbv_tensor** out) {
  return guarded([&] {
    need(dims != nullptr && out != nullptr, "dims and out are required");
    need(dtype >= PBV_DTYPE_F32 && dtype <= PBV_DTYPE_I32, "bad dtype");
    Tensor t(static_cast<DType>(dtype),
             std::vector<uint32_t>(dims, dims + ndim));
    if (data) std::memcpy(t.raw(), data, t.byte_size());
    *out = new pbv_tensor{std::move(t)};
  });
}

pbv_status pbv_tensor_read_pbt(const char* path, pbv_tensor** out) {
  return guarded([&] {
    need(path && out, "path and out are required");
    *out = new pbv_tensor{read_pbt(path)};
  });
}

pbv_status pbv_tensor_write_pbt(const pbv_tensor* t, const char* path) {
  return guarded([&] {
    need(t && path, "tensor and path are required");
    write_pbt(t->t, path);
  });
}

pbv_dtype pbv_tensor_dtype(const pbv_tensor* t) {
  return static_cast<pbv_dtype>(t->t.dtype());
}

uint32_t pbv_tensor_ndim(const pbv_tensor* t) {
  return static_cast<uint32_t>(t->t.ndim());
}

void pbv_tensor_dims(const pbv_tensor* t, uint32_t dims[4]) {
  for (uint32_t i = 0; i < 4; ++i)
    dims[i] = i < t->t.ndim() ? t->t.dim(i) : 0;
}

size_t pbv_tensor_byte_size(const pbv_tensor* t) { return t->t.byte_size(); }

const void* pbv_tensor_data(const pbv_tensor* t) { return t->t.raw(); }

void* pbv_tensor_data_mut(pbv_tensor* t) { return t->t.raw(); }

void pbv_tensor_free(pbv_tensor* t) { delete t; }

pbv_status pbv_depth_read_pgm(const char* path, pbv_tensor** out) {
  return guarded([&] {
    need(path && out, "path and out are required");
    *out = new pbv_tensor{read_depth_pgm(path).to_tensor()};
  });
}

pbv_status pbv_depth_write_pgm(const pbv_tensor* depth, const char* path) {
  return guarded([&] {
    need(path, "path is required");
    write_depth_pgm(depth_from_handle(depth), path);
  });
}

pbv_status pbv_image_read_ppm(const char* path, pbv_tensor** out) {
  return guarded([&] {
    need(path && out, "path and out are required");
    *out = new pbv_tensor{read_ppm(path).to_tensor()};
  });
}

pbv_status pbv_image_write_ppm(const pbv_tensor* rgb, const char* path) {
  return guarded([&] {
    need(rgb && path, "image and path are required");
    write_ppm(PanoramaImage::from_tensor(rgb->t), path);
  });
}

/* ---- point clouds -------------------------------------------------- */

pbv_status pbv_cloud_create(const double* xyz, const uint8_t* labels,
                            size_t count, pbv_cloud** out) {
  return guarded([&] {
    need(out != nullptr && (count == 0 || xyz != nullptr),
         "points are required");
    LabeledPointCloud c;
    c.points.reserve(count);
    for (size_t i = 0; i < count; ++i)
      c.points.push_back({xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]});
    if (labels) c.labels.assign(labels, labels + count);
    *out = new pbv_cloud{std::move(c)};
  });
}

pbv_status pbv_cloud_read_ply(const char* path, pbv_cloud** out) {
  return guarded([&] {
    need(path && out, "path and out are required");
    *out = new pbv_cloud{read_ply_ascii(path)};
  });
}

pbv_status pbv_cloud_write_ply(const pbv_cloud* cloud, const char* path) {
  return guarded([&] {
    need(cloud && path, "cloud and path are required");
    write_ply_ascii(cloud->c, path);
  });
}

size_t pbv_cloud_size(const pbv_cloud* cloud) { return cloud->c.size(); }

int pbv_cloud_has_labels(const pbv_cloud* cloud) {
  return cloud->c.has_labels() ? 1 : 0;
}

pbv_status pbv_cloud_points(const pbv_cloud* cloud, double* xyz) {
  return guarded([&] {
    need(cloud && xyz, "cloud and buffer are required");
    for (size_t i = 0; i < cloud->c.size(); ++i) {
      xyz[3 * i] = cloud->c.points[i].x;
      xyz[3 * i + 1] = cloud->c.points[i].y;
      xyz[3 * i + 2] = cloud->c.points[i].z;
    }
  });
}

pbv_status pbv_cloud_labels(const pbv_cloud* cloud, uint8_t* labels) {
  return guarded([&] {
    need(cloud && labels, "cloud and buffer are required");
    need(cloud->c.has_labels(), "cloud has no labels");
    std::memcpy(labels, cloud->c.labels.data(), cloud->c.labels.size());
  });
}

pbv_status pbv_cloud_transform(const pbv_cloud* cloud,
                               const pbv_calibration* extrinsic,
                               pbv_cloud** out) {
  return guarded([&] {
    need(cloud && extrinsic && out, "cloud, extrinsic and out are required");
    *out = new pbv_cloud{transform_points(cloud->c, extrinsic->e)};
  });
}

pbv_status pbv_cloud_filter_classes(const pbv_cloud* cloud,
                                    const uint8_t* exclude, size_t n_exclude,
                                    pbv_cloud** out) {
  return guarded([&] {
    need(cloud && out && (n_exclude == 0 || exclude != nullptr),
         "cloud and out are required");
    std::vector<uint8_t> ex(exclude, exclude + n_exclude);
    *out = new pbv_cloud{filter_classes(cloud->c, ex)};
  });
}

pbv_status pbv_cloud_mask_valid(const pbv_cloud* cloud,
                                const pbv_grid_spec* grid, uint8_t* mask) {
  return guarded([&] {
    need(cloud && mask, "cloud and mask buffer are required");
    ValidMask m = mask_valid(cloud->c, to_grid(grid));
    std::memcpy(mask, m.data(), m.size());
  });
}

void pbv_cloud_free(pbv_cloud* cloud) { delete cloud; }

/* ---- calibration ---------------------------------------------------- */

pbv_status pbv_calibration_create(const double matrix[16],
                                  pbv_calibration** out) {
  return guarded([&] {
    need(matrix && out, "matrix and out are required");
    std::array<double, 16> m;
    std::memcpy(m.data(), matrix, sizeof(m));
    *out = new pbv_calibration{CalibrationExtrinsic::from_matrix(m)};
  });
}

pbv_status pbv_calibration_read_json(const char* path,
                                     pbv_calibration** out) {
  return guarded([&] {
    need(path && out, "path and out are required");
    *out = new pbv_calibration{read_calibration_json(path)};
  });
}

void pbv_calibration_matrix(const pbv_calibration* c, double matrix[16]) {
  std::array<double, 16> m = c->e.matrix();
  std::memcpy(matrix, m.data(), sizeof(m));
}

void pbv_calibration_free(pbv_calibration* c) { delete c; }

/* ---- spherical geometry --------------------------------------------- */

pbv_status pbv_cart_to_sph(const double* xyz, size_t count,
                           double* phi_theta) {
  return guarded([&] {
    need(xyz && phi_theta, "buffers are required");
    for (size_t i = 0; i < count; ++i) {
      SphericalAngle a =
          cart_to_sph({xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]});
      phi_theta[2 * i] = a.phi;
      phi_theta[2 * i + 1] = a.theta;
    }
  });
}

pbv_status pbv_sph_to_pixel(const double* phi_theta, size_t count,
                            uint32_t height, uint32_t width,
                            int32_t* rowcol) {
  return guarded([&] {
    need(phi_theta && rowcol, "buffers are required");
    for (size_t i = 0; i < count; ++i) {
      PixelIndex p = sph_to_pixel({phi_theta[2 * i], phi_theta[2 * i + 1]},
                                  height, width);
      rowcol[2 * i] = p.row;
      rowcol[2 * i + 1] = p.col;
    }
  });
}

pbv_status pbv_rotate_panorama(const pbv_tensor* image, double pitch_rad,
                               double roll_rad, pbv_interp interp,
                               pbv_tensor** out) {
  return guarded([&] {
    need(image && out, "image and out are required");
    RotationPR rot = rotation_pr(pitch_rad, roll_rad);
    Interp mode =
        interp == PBV_INTERP_BILINEAR ? Interp::bilinear : Interp::nearest;
    const Tensor& t = image->t;
    if (t.dtype() == DType::u8 && t.ndim() == 3) {
      *out = new pbv_tensor{
          rotate_panorama(PanoramaImage::from_tensor(t), rot, mode)
              .to_tensor()};
    } else if (t.dtype() == DType::f32 && t.ndim() == 2) {
      *out = new pbv_tensor{
          rotate_panorama(DepthPanorama::from_tensor(t), rot, mode)
              .to_tensor()};
    } else if (t.dtype() == DType::u8 && t.ndim() == 2) {
      *out = new pbv_tensor{
          rotate_panorama(SemanticPanorama::from_tensor(t), rot, mode)
              .to_tensor()};
    } else {
      fail(ErrorCode::invalid_argument,
           "rotate: expected u8 HxWx3, u8 HxW or f32 HxW tensor");
    }
  });
}

/* ---- cross-modal projection ----------------------------------------- */

pbv_status pbv_depth_to_points(const pbv_tensor* depth,
                               const pbv_tensor* semantic, pbv_cloud** out) {
  return guarded([&] {
    need(out != nullptr, "out is required");
    DepthPanorama d = depth_from_handle(depth);
    if (semantic) {
      SemanticPanorama s = SemanticPanorama::from_tensor(semantic->t);
      *out = new pbv_cloud{depth_to_points(d, &s)};
    } else {
      *out = new pbv_cloud{depth_to_points(d)};
    }
  });
}

pbv_status pbv_lidar_to_panorama(const pbv_cloud* cloud,
                                 const pbv_calibration* extrinsic,
                                 uint32_t height, uint32_t width,
                                 pbv_tensor** depth_out,
                                 pbv_tensor** label_out, size_t* skipped) {
  return guarded([&] {
    need(cloud && depth_out, "cloud and depth_out are required");
    CalibrationExtrinsic e =
        extrinsic ? extrinsic->e : CalibrationExtrinsic::identity();
    SparseProjection sp = lidar_to_panorama(cloud->c, e, height, width);
    *depth_out = new pbv_tensor{sp.depth.to_tensor()};
    if (label_out)
      *label_out =
          sp.has_labels ? new pbv_tensor{sp.labels.to_tensor()} : nullptr;
    if (skipped) *skipped = sp.skipped;
  });
}

/* ---- BEV mapping ----------------------------------------------------- */

pbv_status pbv_rasterize(const pbv_cloud* cloud, const pbv_grid_spec* grid,
                         pbv_bev** out) {
  return guarded([&] {
    need(cloud && out, "cloud and out are required");
    *out = new pbv_bev{rasterize_bev(cloud->c, to_grid(grid))};
  });
}

pbv_status pbv_bev_from_tensors(const pbv_tensor* labels,
                                const pbv_tensor* mask,
                                const pbv_tensor* heights, pbv_bev** out) {
  return guarded([&] {
    need(labels && out, "labels and out are required");
    *out = new pbv_bev{SemanticBevMap::from_tensors(
        labels->t, mask ? &mask->t : nullptr, heights ? &heights->t : nullptr)};
  });
}

pbv_status pbv_bev_labels(const pbv_bev* bev, pbv_tensor** out) {
  return guarded([&] {
    need(bev && out, "bev and out are required");
    *out = new pbv_tensor{bev->m.labels_tensor()};
  });
}

pbv_status pbv_bev_mask(const pbv_bev* bev, pbv_tensor** out) {
  return guarded([&] {
    need(bev && out, "bev and out are required");
    *out = new pbv_tensor{bev->m.mask_tensor()};
  });
}

pbv_status pbv_bev_heights(const pbv_bev* bev, pbv_tensor** out) {
  return guarded([&] {
    need(bev && out, "bev and out are required");
    *out = new pbv_tensor{bev->m.heights_tensor()};
  });
}

size_t pbv_bev_observed_count(const pbv_bev* bev) {
  return bev->m.observed_count();
}

void pbv_bev_free(pbv_bev* bev) { delete bev; }

pbv_status pbv_bev_metrics(const pbv_bev* pred, const pbv_bev* gt,
                           uint32_t num_classes, int include_void,
                           pbv_metrics* out, double* per_class_iou) {
  return guarded([&] {
    need(pred && gt && out, "pred, gt and out are required");
    MetricsReport r =
        bev_metrics(pred->m, gt->m, num_classes, include_void != 0);
    out->acc = r.acc;
    out->m_recall = r.m_recall;
    out->m_precision = r.m_precision;
    out->m_iou = r.m_iou;
    if (per_class_iou) {
      for (uint32_t k = 0; k < num_classes; ++k)
        per_class_iou[k] =
            r.per_class[k].present ? r.per_class[k].iou : -1.0;
    }
  });
}

pbv_status pbv_bev_agreement(const pbv_bev* pred, const pbv_bev* gt,
                             double* out) {
  return guarded([&] {
    need(pred && gt && out, "pred, gt and out are required");
    *out = label_agreement(pred->m, gt->m);
  });
}

/* ---- synthetic scenes ------------------------------------------------ */

pbv_status pbv_scene_load(const char* path, pbv_scene** out) {
  return guarded([&] {
    need(path && out, "path and out are required");
    *out = new pbv_scene{SceneSpec::load(path)};
  });
}

pbv_status pbv_scene_parse(const char* json_text, pbv_scene** out) {
  return guarded([&] {
    need(json_text && out, "json and out are required");
    *out = new pbv_scene{SceneSpec::from_json(json_text)};
  });
}

pbv_status pbv_scene_classes(const pbv_scene* scene, uint32_t* out) {
  return guarded([&] {
    need(scene && out, "scene and out are required");
    *out = scene->s.num_classes;
  });
}

pbv_status pbv_scene_render(const pbv_scene* scene, uint32_t height,
                            uint32_t width, pbv_tensor** rgb,
                            pbv_tensor** depth, pbv_tensor** semantic) {
  return guarded([&] {
    need(scene != nullptr, "scene is required");
    RenderedPanorama r = render_panorama(scene->s, height, width);
    if (rgb) *rgb = new pbv_tensor{r.rgb.to_tensor()};
    if (depth) *depth = new pbv_tensor{r.depth.to_tensor()};
    if (semantic) *semantic = new pbv_tensor{r.semantic.to_tensor()};
  });
}

pbv_status pbv_scene_gt_bev(const pbv_scene* scene, const pbv_grid_spec* grid,
                            pbv_bev** out) {
  return guarded([&] {
    need(scene && out, "scene and out are required");
    *out = new pbv_bev{ground_truth_bev(scene->s, to_grid(grid))};
  });
}

pbv_status pbv_scene_lidar(const pbv_scene* scene, uint32_t n_azimuth,
                           uint32_t n_elevation, double elevation_min_rad,
                           double elevation_max_rad, pbv_cloud** out) {
  return guarded([&] {
    need(scene && out, "scene and out are required");
    *out = new pbv_cloud{sparse_lidar_sample(
        scene->s, n_azimuth, n_elevation, elevation_min_rad,
        elevation_max_rad)};
  });
}

void pbv_scene_free(pbv_scene* scene) { delete scene; }

/* ---- PD attention ----------------------------------------------------- */

pbv_status pbv_attention_init(uint32_t channels, uint32_t n_ref,
                              uint64_t seed, pbv_attention** out) {
  return guarded([&] {
    need(out != nullptr, "out is required");
    *out = new pbv_attention{init_params(channels, n_ref, seed)};
  });
}

pbv_status pbv_attention_randomize(pbv_attention* params, uint64_t seed,
                                   double scale) {
  return guarded([&] {
    need(params != nullptr, "params are required");
    randomize_params(params->p, seed, scale);
  });
}

pbv_status pbv_attention_save(const pbv_attention* params, const char* path) {
  return guarded([&] {
    need(params && path, "params and path are required");
    write_pbt(pack_params(params->p), path);
  });
}

pbv_status pbv_attention_load(const char* path, pbv_attention** out) {
  return guarded([&] {
    need(path && out, "path and out are required");
    *out = new pbv_attention{unpack_params(read_pbt(path))};
  });
}

pbv_status pbv_attention_forward(const pbv_attention* params,
                                 const pbv_tensor* queries,
                                 const pbv_cloud* refs, const uint8_t* mask,
                                 const pbv_grid_spec* grid,
                                 const pbv_tensor* features,
                                 pbv_tensor** output, pbv_tensor** weights,
                                 pbv_tensor** rows_out) {
  return guarded([&] {
    need(params && queries && refs && features && output,
         "params, queries, refs, features and output are required");
    Mat q = mat_from_tensor(queries->t);
    FeatureMap f = feature_map_from_tensor(features->t);
    ValidMask m;
    if (mask) {
      m.assign(mask, mask + refs->c.size());
    } else {
      m = mask_valid(refs->c, to_grid(grid));
    }
    SphericalRefs s = refs_from_points(refs->c.points);
    PdAttentionResult r = pd_attention_forward(q, s, m, f, params->p);
    *output = new pbv_tensor{mat_to_tensor(r.output)};
    if (weights) *weights = new pbv_tensor{mat_to_tensor(r.weights)};
    if (rows_out) {
      Tensor rows = Tensor::of<int32_t>(
          {static_cast<uint32_t>(std::max<std::size_t>(r.rows.size(), 1))});
      auto rv = rows.as<int32_t>();
      for (std::size_t i = 0; i < r.rows.size(); ++i)
        rv[i] = static_cast<int32_t>(r.rows[i]);
      if (r.rows.empty()) rv[0] = -1;  // sentinel for "no rows kept"
      *rows_out = new pbv_tensor{std::move(rows)};
    }
  });
}

pbv_status pbv_attention_grad_check(uint32_t n_queries, uint32_t channels,
                                    uint32_t n_ref, uint32_t height,
                                    uint32_t width, uint64_t seed,
                                    double step, double* max_rel_err,
                                    size_t* checked) {
  return guarded([&] {
    need(max_rel_err != nullptr, "max_rel_err is required");
    GradCheckReport r = run_gradient_check(n_queries, channels, n_ref,
                                           height, width, seed, step);
    *max_rel_err = r.max_rel_err;
    if (checked) *checked = r.checked;
  });
}

void pbv_attention_free(pbv_attention* params) { delete params; }

/* ---- augmentation ----------------------------------------------------- */

namespace {

Tensor flip_any(const Tensor& t) {
  if (t.dtype() == DType::u8 && t.ndim() == 3)
    return pano_flip(PanoramaImage::from_tensor(t)).to_tensor();
  if (t.dtype() == DType::f32 && t.ndim() == 2)
    return pano_flip(DepthPanorama::from_tensor(t)).to_tensor();
  if (t.dtype() == DType::u8 && t.ndim() == 2)
    return pano_flip(SemanticPanorama::from_tensor(t)).to_tensor();
  fail(ErrorCode::invalid_argument,
       "pano_flip: expected u8 HxWx3, u8 HxW or f32 HxW tensor");
}

}  // namespace

pbv_status pbv_pano_flip(const pbv_tensor* image, pbv_tensor** out) {
  return guarded([&] {
    need(image && out, "image and out are required");
    *out = new pbv_tensor{flip_any(image->t)};
  });
}

pbv_status pbv_pano_mix(const pbv_tensor* a, const pbv_tensor* b,
                        double lambda, pbv_tensor** out) {
  return guarded([&] {
    need(a && b && out, "images and out are required");
    *out = new pbv_tensor{pano_mix(PanoramaImage::from_tensor(a->t),
                                   PanoramaImage::from_tensor(b->t), lambda)
                              .to_tensor()};
  });
}

pbv_status pbv_bev_flip(const pbv_bev* map, pbv_bev** out) {
  return guarded([&] {
    need(map && out, "map and out are required");
    *out = new pbv_bev{bev_flip(map->m)};
  });
}

pbv_status pbv_bev_rotate(const pbv_bev* map, double theta_rad,
                          double center_x, double center_y, pbv_bev** out) {
  return guarded([&] {
    need(map && out, "map and out are required");
    *out = new pbv_bev{bev_rotate(map->m, theta_rad, center_x, center_y)};
  });
}

pbv_status pbv_bev_mix_mask(const pbv_bev* a, const pbv_bev* b, double lambda,
                            uint64_t seed, pbv_bev** out) {
  return guarded([&] {
    need(a && b && out, "maps and out are required");
    *out = new pbv_bev{bev_mix_mask(a->m, b->m, lambda, seed)};
  });
}

pbv_status pbv_bev_mix_prob(const pbv_tensor* a, const pbv_tensor* b,
                            double lambda, pbv_tensor** out) {
  return guarded([&] {
    need(a && b && out, "tensors and out are required");
    *out = new pbv_tensor{bev_mix_prob(a->t, b->t, lambda)};
  });
}

pbv_status pbv_bev_to_onehot(const pbv_bev* map, uint32_t num_classes,
                             pbv_tensor** out) {
  return guarded([&] {
    need(map && out, "map and out are required");
    *out = new pbv_tensor{bev_to_onehot(map->m, num_classes)};
  });
}

pbv_status pbv_joint_augment(const pbv_tensor* rgb, const pbv_tensor* depth,
                             const pbv_tensor* semantic, const pbv_bev* gt,
                             const pbv_tensor* mix_rgb, const pbv_bev* mix_gt,
                             const char* spec_json, uint64_t sample_id,
                             pbv_tensor** rgb_out, pbv_tensor** depth_out,
                             pbv_tensor** semantic_out, pbv_bev** gt_out,
                             char** metadata_json) {
  return guarded([&] {
    need(spec_json != nullptr, "spec json is required");
    AugmentSpec spec = AugmentSpec::from_json(spec_json);
    Sample sample;
    if (rgb) sample.rgb = PanoramaImage::from_tensor(rgb->t);
    if (depth) sample.depth = DepthPanorama::from_tensor(depth->t);
    if (semantic) sample.semantic = SemanticPanorama::from_tensor(semantic->t);
    if (gt) sample.gt_bev = gt->m;
    Sample partner;
    bool has_partner = mix_rgb != nullptr || mix_gt != nullptr;
    if (mix_rgb) partner.rgb = PanoramaImage::from_tensor(mix_rgb->t);
    if (mix_gt) partner.gt_bev = mix_gt->m;
    AugmentOutcome outcome = joint_augment(
        sample, spec, sample_id, has_partner ? &partner : nullptr);
    if (rgb_out)
      *rgb_out = outcome.sample.rgb
                     ? new pbv_tensor{outcome.sample.rgb->to_tensor()}
                     : nullptr;
    if (depth_out)
      *depth_out = outcome.sample.depth
                       ? new pbv_tensor{outcome.sample.depth->to_tensor()}
                       : nullptr;
    if (semantic_out)
      *semantic_out =
          outcome.sample.semantic
              ? new pbv_tensor{outcome.sample.semantic->to_tensor()}
              : nullptr;
    if (gt_out)
      *gt_out = outcome.sample.gt_bev ? new pbv_bev{*outcome.sample.gt_bev}
                                      : nullptr;
    if (metadata_json) *metadata_json = dup_string(outcome.metadata_json);
  });
}

}  // extern "C"
