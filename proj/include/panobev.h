/* panobev C API: panoramic/LiDAR cross-modal geometry behind opaque
 * handles and status codes. Every function returns PBV_OK or an error
 * code; pbv_last_error() describes the most recent failure on the
 * calling thread. Out-parameters are written only on success; handles
 * are released with their matching _free function.
 */
#ifndef PANOBEV_H
#define PANOBEV_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pbv_status {
  PBV_OK = 0,
  PBV_ERROR_FORMAT = 2,      /* malformed or unsupported file content */
  PBV_ERROR_CALIBRATION = 3, /* extrinsic invariant violation */
  PBV_ERROR_THRESHOLD = 4,   /* an agreement threshold was not met */
  PBV_ERROR_INVALID = 5,     /* bad arguments, shapes or modes */
  PBV_ERROR_IO = 6,          /* filesystem failure */
  PBV_ERROR_INTERNAL = 7
} pbv_status;

typedef enum pbv_dtype {
  PBV_DTYPE_F32 = 0,
  PBV_DTYPE_U8 = 1,
  PBV_DTYPE_U16 = 2,
  PBV_DTYPE_I32 = 3
} pbv_dtype;

typedef enum pbv_interp {
  PBV_INTERP_NEAREST = 0,
  PBV_INTERP_BILINEAR = 1
} pbv_interp;

typedef struct pbv_tensor pbv_tensor;
typedef struct pbv_cloud pbv_cloud;
typedef struct pbv_calibration pbv_calibration;
typedef struct pbv_scene pbv_scene;
typedef struct pbv_bev pbv_bev;
typedef struct pbv_attention pbv_attention;

/* Sensor-centered BEV grid; the reference configuration is 500x500
 * cells over 10m x 10m. */
typedef struct pbv_grid_spec {
  uint32_t cells_x;
  uint32_t cells_y;
  double range_x; /* meters */
  double range_y;
} pbv_grid_spec;

typedef struct pbv_metrics {
  double acc;
  double m_recall;
  double m_precision;
  double m_iou;
} pbv_metrics;

const char* pbv_version(void);
/* Message for the last failure on this thread; empty string if none. */
const char* pbv_last_error(void);
void pbv_string_free(char* s);

/* ---- tensors ------------------------------------------------------ */
pbv_status pbv_tensor_create(pbv_dtype dtype, const uint32_t* dims,
                             uint32_t ndim, const void* data /* nullable */,
                             pbv_tensor** out);
pbv_status pbv_tensor_read_pbt(const char* path, pbv_tensor** out);
pbv_status pbv_tensor_write_pbt(const pbv_tensor* t, const char* path);
pbv_dtype pbv_tensor_dtype(const pbv_tensor* t);
uint32_t pbv_tensor_ndim(const pbv_tensor* t);
void pbv_tensor_dims(const pbv_tensor* t, uint32_t dims[4]);
size_t pbv_tensor_byte_size(const pbv_tensor* t);
const void* pbv_tensor_data(const pbv_tensor* t);
void* pbv_tensor_data_mut(pbv_tensor* t);
void pbv_tensor_free(pbv_tensor* t);

/* Depth panoramas: f32 HxW meters in memory, 16-bit millimeter PGM on
 * disk (sample 0 = no return). RGB images: u8 HxWx3, binary PPM. */
pbv_status pbv_depth_read_pgm(const char* path, pbv_tensor** out);
pbv_status pbv_depth_write_pgm(const pbv_tensor* depth, const char* path);
pbv_status pbv_image_read_ppm(const char* path, pbv_tensor** out);
pbv_status pbv_image_write_ppm(const pbv_tensor* rgb, const char* path);

/* ---- point clouds -------------------------------------------------- */
pbv_status pbv_cloud_create(const double* xyz, const uint8_t* labels,
                            size_t count, pbv_cloud** out);
pbv_status pbv_cloud_read_ply(const char* path, pbv_cloud** out);
pbv_status pbv_cloud_write_ply(const pbv_cloud* cloud, const char* path);
size_t pbv_cloud_size(const pbv_cloud* cloud);
int pbv_cloud_has_labels(const pbv_cloud* cloud);
/* Buffers must hold 3*count doubles / count bytes respectively. */
pbv_status pbv_cloud_points(const pbv_cloud* cloud, double* xyz);
pbv_status pbv_cloud_labels(const pbv_cloud* cloud, uint8_t* labels);
pbv_status pbv_cloud_transform(const pbv_cloud* cloud,
                               const pbv_calibration* extrinsic,
                               pbv_cloud** out);
pbv_status pbv_cloud_filter_classes(const pbv_cloud* cloud,
                                    const uint8_t* exclude, size_t n_exclude,
                                    pbv_cloud** out);
/* mask gets one byte per point: 1 inside the BEV window with positive
 * finite range, else 0. */
pbv_status pbv_cloud_mask_valid(const pbv_cloud* cloud,
                                const pbv_grid_spec* grid, uint8_t* mask);
void pbv_cloud_free(pbv_cloud* cloud);

/* ---- calibration ---------------------------------------------------- */
pbv_status pbv_calibration_create(const double matrix[16],
                                  pbv_calibration** out);
pbv_status pbv_calibration_read_json(const char* path, pbv_calibration** out);
void pbv_calibration_matrix(const pbv_calibration* c, double matrix[16]);
void pbv_calibration_free(pbv_calibration* c);

/* ---- spherical geometry --------------------------------------------- */
/* xyz: 3*count doubles; phi_theta out: 2*count doubles. */
pbv_status pbv_cart_to_sph(const double* xyz, size_t count,
                           double* phi_theta);
/* phi_theta: 2*count; rowcol out: 2*count int32 (row, col). */
pbv_status pbv_sph_to_pixel(const double* phi_theta, size_t count,
                            uint32_t height, uint32_t width, int32_t* rowcol);
/* Accepts u8 HxWx3 (nearest or bilinear) or f32 HxW depth (nearest). */
pbv_status pbv_rotate_panorama(const pbv_tensor* image, double pitch_rad,
                               double roll_rad, pbv_interp interp,
                               pbv_tensor** out);

/* ---- cross-modal projection ----------------------------------------- */
pbv_status pbv_depth_to_points(const pbv_tensor* depth,
                               const pbv_tensor* semantic /* nullable */,
                               pbv_cloud** out);
/* extrinsic may be NULL for identity. label_out may be NULL; *label_out
 * is NULL when the cloud carries no labels. */
pbv_status pbv_lidar_to_panorama(const pbv_cloud* cloud,
                                 const pbv_calibration* extrinsic,
                                 uint32_t height, uint32_t width,
                                 pbv_tensor** depth_out,
                                 pbv_tensor** label_out,
                                 size_t* skipped /* nullable */);

/* ---- BEV mapping ----------------------------------------------------- */
pbv_status pbv_rasterize(const pbv_cloud* cloud, const pbv_grid_spec* grid,
                         pbv_bev** out);
pbv_status pbv_bev_from_tensors(const pbv_tensor* labels,
                                const pbv_tensor* mask /* nullable */,
                                const pbv_tensor* heights /* nullable */,
                                pbv_bev** out);
pbv_status pbv_bev_labels(const pbv_bev* bev, pbv_tensor** out);
pbv_status pbv_bev_mask(const pbv_bev* bev, pbv_tensor** out);
pbv_status pbv_bev_heights(const pbv_bev* bev, pbv_tensor** out);
size_t pbv_bev_observed_count(const pbv_bev* bev);
void pbv_bev_free(pbv_bev* bev);

/* Metrics over cells observed in gt; per_class_iou (nullable) must hold
 * num_classes doubles, -1 marks classes absent from gt. */
pbv_status pbv_bev_metrics(const pbv_bev* pred, const pbv_bev* gt,
                           uint32_t num_classes, int include_void,
                           pbv_metrics* out, double* per_class_iou);
/* Fraction of jointly observed cells with equal labels. */
pbv_status pbv_bev_agreement(const pbv_bev* pred, const pbv_bev* gt,
                             double* out);

/* ---- synthetic scenes ------------------------------------------------ */
pbv_status pbv_scene_load(const char* path, pbv_scene** out);
pbv_status pbv_scene_parse(const char* json_text, pbv_scene** out);
pbv_status pbv_scene_classes(const pbv_scene* scene, uint32_t* out);
pbv_status pbv_scene_render(const pbv_scene* scene, uint32_t height,
                            uint32_t width, pbv_tensor** rgb,
                            pbv_tensor** depth, pbv_tensor** semantic);
pbv_status pbv_scene_gt_bev(const pbv_scene* scene, const pbv_grid_spec* grid,
                            pbv_bev** out);
pbv_status pbv_scene_lidar(const pbv_scene* scene, uint32_t n_azimuth,
                           uint32_t n_elevation, double elevation_min_rad,
                           double elevation_max_rad, pbv_cloud** out);
void pbv_scene_free(pbv_scene* scene);

/* ---- PD attention ----------------------------------------------------- */
pbv_status pbv_attention_init(uint32_t channels, uint32_t n_ref,
                              uint64_t seed, pbv_attention** out);
pbv_status pbv_attention_randomize(pbv_attention* params, uint64_t seed,
                                   double scale);
pbv_status pbv_attention_save(const pbv_attention* params, const char* path);
pbv_status pbv_attention_load(const char* path, pbv_attention** out);
/* queries: f32 NxC; features: f32 CxHxW; cloud supplies the 3D reference
 * points (camera frame). mask (nullable, N bytes) defaults to the BEV
 * window mask from grid; rows_out reports the original row index of each
 * output row (i32). */
pbv_status pbv_attention_forward(const pbv_attention* params,
                                 const pbv_tensor* queries,
                                 const pbv_cloud* refs,
                                 const uint8_t* mask /* nullable */,
                                 const pbv_grid_spec* grid,
                                 const pbv_tensor* features,
                                 pbv_tensor** output,
                                 pbv_tensor** weights,
                                 pbv_tensor** rows_out);
/* Central finite-difference check on a seeded fixture; writes the
 * maximum relative error across parameters and Q, F inputs. */
pbv_status pbv_attention_grad_check(uint32_t n_queries, uint32_t channels,
                                    uint32_t n_ref, uint32_t height,
                                    uint32_t width, uint64_t seed,
                                    double step, double* max_rel_err,
                                    size_t* checked /* nullable */);
void pbv_attention_free(pbv_attention* params);

/* ---- augmentation ----------------------------------------------------- */
pbv_status pbv_pano_flip(const pbv_tensor* image, pbv_tensor** out);
pbv_status pbv_pano_mix(const pbv_tensor* a, const pbv_tensor* b,
                        double lambda, pbv_tensor** out);
pbv_status pbv_bev_flip(const pbv_bev* map, pbv_bev** out);
pbv_status pbv_bev_rotate(const pbv_bev* map, double theta_rad,
                          double center_x, double center_y, pbv_bev** out);
pbv_status pbv_bev_mix_mask(const pbv_bev* a, const pbv_bev* b, double lambda,
                            uint64_t seed, pbv_bev** out);
pbv_status pbv_bev_mix_prob(const pbv_tensor* a, const pbv_tensor* b,
                            double lambda, pbv_tensor** out);
pbv_status pbv_bev_to_onehot(const pbv_bev* map, uint32_t num_classes,
                             pbv_tensor** out);
/* Joint seeded augmentation of an (rgb, depth, semantic, gt bev) sample;
 * any input may be NULL and its output stays NULL. metadata_json (free
 * with pbv_string_free) records the drawn decisions for replay. */
pbv_status pbv_joint_augment(const pbv_tensor* rgb, const pbv_tensor* depth,
                             const pbv_tensor* semantic, const pbv_bev* gt,
                             const pbv_tensor* mix_rgb /* nullable */,
                             const pbv_bev* mix_gt /* nullable */,
                             const char* spec_json, uint64_t sample_id,
                             pbv_tensor** rgb_out, pbv_tensor** depth_out,
                             pbv_tensor** semantic_out, pbv_bev** gt_out,
                             char** metadata_json);

#ifdef __cplusplus
}
#endif

#endif /* PANOBEV_H */
