// panobev CLI: batch front door over the C API. Subcommands compose the
// pipeline stages (render, project, rasterize, eval, attend, augment,
// rotate, demo-pipeline); all outputs are deterministic for fixed flags
// and seeds.
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panobev.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCalibration = 3;
constexpr int kExitThreshold = 4;

int exit_code_for(pbv_status status) {
  switch (status) {
    case PBV_OK: return kExitOk;
    case PBV_ERROR_CALIBRATION: return kExitCalibration;
    case PBV_ERROR_THRESHOLD: return kExitThreshold;
    case PBV_ERROR_INTERNAL: return 1;
    default: return kExitInput;
  }
}

void check(pbv_status status, const char* what) {
  if (status == PBV_OK) return;
  std::fprintf(stderr, "panobev: %s: %s\n", what, pbv_last_error());
  std::exit(exit_code_for(status));
}

struct TensorDeleter { void operator()(pbv_tensor* t) const { pbv_tensor_free(t); } };
struct CloudDeleter { void operator()(pbv_cloud* c) const { pbv_cloud_free(c); } };
struct CalibDeleter { void operator()(pbv_calibration* c) const { pbv_calibration_free(c); } };
struct SceneDeleter { void operator()(pbv_scene* s) const { pbv_scene_free(s); } };
struct BevDeleter { void operator()(pbv_bev* b) const { pbv_bev_free(b); } };
struct AttnDeleter { void operator()(pbv_attention* a) const { pbv_attention_free(a); } };

using TensorPtr = std::unique_ptr<pbv_tensor, TensorDeleter>;
using CloudPtr = std::unique_ptr<pbv_cloud, CloudDeleter>;
using CalibPtr = std::unique_ptr<pbv_calibration, CalibDeleter>;
using ScenePtr = std::unique_ptr<pbv_scene, SceneDeleter>;
using BevPtr = std::unique_ptr<pbv_bev, BevDeleter>;
using AttnPtr = std::unique_ptr<pbv_attention, AttnDeleter>;

// Default 21-entry class palette (20 categories + void) for BEV label
// visualizations; void is dark gray, unobserved cells render black.
const uint8_t kPalette[21][3] = {
    {64, 64, 64},    {152, 223, 138}, {31, 119, 180},  {255, 187, 120},
    {188, 189, 34},  {140, 86, 75},   {255, 152, 150}, {214, 39, 40},
    {197, 176, 213}, {148, 103, 189}, {196, 156, 148}, {23, 190, 207},
    {247, 182, 210}, {219, 219, 141}, {255, 127, 14},  {158, 218, 229},
    {44, 160, 44},   {112, 128, 144}, {227, 119, 194}, {82, 84, 163},
    {163, 116, 81}};

uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    std::fprintf(stderr, "panobev: cannot hash %s\n", path.string().c_str());
    std::exit(kExitInput);
  }
  uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  return h;
}

char hex_digit(uint64_t v) { return "0123456789abcdef"[v & 0xf]; }

std::string hex64(uint64_t v) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = hex_digit(v);
    v >>= 4;
  }
  return s;
}

// Manifest entries reference basenames only so reruns into any directory
// produce identical bytes.
void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<fs::path>& artifacts,
                    const json& extra = json::object()) {
  json doc;
  doc["command"] = command;
  doc["artifacts"] = json::array();
  for (const fs::path& p : artifacts) {
    json a;
    a["name"] = p.filename().string();
    a["bytes"] = static_cast<uint64_t>(fs::file_size(p));
    a["fnv1a64"] = hex64(fnv1a64_file(p));
    doc["artifacts"].push_back(a);
  }
  for (auto it = extra.begin(); it != extra.end(); ++it)
    doc[it.key()] = it.value();
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << doc.dump(2) << "\n";
}

TensorPtr read_pbt(const std::string& path) {
  pbv_tensor* t = nullptr;
  check(pbv_tensor_read_pbt(path.c_str(), &t), path.c_str());
  return TensorPtr(t);
}

void write_pbt(const pbv_tensor* t, const fs::path& path) {
  check(pbv_tensor_write_pbt(t, path.string().c_str()), "write pbt");
}

// Renders a u8 label grid through the palette into an RGB tensor.
TensorPtr labels_to_vis(const pbv_tensor* labels) {
  uint32_t dims[4];
  pbv_tensor_dims(labels, dims);
  uint32_t h = dims[0], w = dims[1];
  const auto* lv = static_cast<const uint8_t*>(pbv_tensor_data(labels));
  std::vector<uint8_t> rgb(static_cast<size_t>(h) * w * 3, 0);
  for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) {
    uint8_t l = lv[i];
    if (l == 255) continue;  // unobserved -> black
    const uint8_t* c = kPalette[l % 21];
    rgb[3 * i] = c[0];
    rgb[3 * i + 1] = c[1];
    rgb[3 * i + 2] = c[2];
  }
  uint32_t vdims[3] = {h, w, 3};
  pbv_tensor* vis = nullptr;
  check(pbv_tensor_create(PBV_DTYPE_U8, vdims, 3, rgb.data(), &vis),
        "visualization tensor");
  return TensorPtr(vis);
}

void write_bev_outputs(const pbv_bev* bev, const fs::path& dir,
                       const std::string& stem,
                       std::vector<fs::path>& artifacts,
                       const std::string& vis_name = "") {
  pbv_tensor* labels = nullptr;
  pbv_tensor* mask = nullptr;
  pbv_tensor* heights = nullptr;
  check(pbv_bev_labels(bev, &labels), "bev labels");
  check(pbv_bev_mask(bev, &mask), "bev mask");
  check(pbv_bev_heights(bev, &heights), "bev heights");
  TensorPtr l(labels), m(mask), h(heights);
  fs::path lp = dir / (stem + ".labels.pbt");
  fs::path mp = dir / (stem + ".mask.pbt");
  fs::path hp = dir / (stem + ".heights.pbt");
  write_pbt(l.get(), lp);
  write_pbt(m.get(), mp);
  write_pbt(h.get(), hp);
  artifacts.push_back(lp);
  artifacts.push_back(mp);
  artifacts.push_back(hp);
  if (!vis_name.empty()) {
    TensorPtr vis = labels_to_vis(l.get());
    fs::path vp = dir / vis_name;
    check(pbv_image_write_ppm(vis.get(), vp.string().c_str()), "write vis");
    artifacts.push_back(vp);
  }
}

BevPtr load_bev_prefix(const std::string& prefix) {
  TensorPtr labels = read_pbt(prefix + ".labels.pbt");
  TensorPtr mask, heights;
  std::string mp = prefix + ".mask.pbt";
  std::string hp = prefix + ".heights.pbt";
  if (fs::exists(mp)) mask = read_pbt(mp);
  if (fs::exists(hp)) heights = read_pbt(hp);
  pbv_bev* bev = nullptr;
  check(pbv_bev_from_tensors(labels.get(), mask.get(), heights.get(), &bev),
        "assemble bev");
  return BevPtr(bev);
}

std::vector<uint8_t> parse_class_list(const std::string& csv) {
  std::vector<uint8_t> out;
  std::string cur;
  for (char ch : csv + ",") {
    if (ch == ',') {
      if (!cur.empty()) {
        out.push_back(static_cast<uint8_t>(std::stoul(cur)));
        cur.clear();
      }
    } else {
      cur += ch;
    }
  }
  return out;
}

json metrics_json(const pbv_metrics& m, const std::vector<double>& per_class) {
  json doc;
  doc["acc"] = m.acc;
  doc["mRecall"] = m.m_recall;
  doc["mPrecision"] = m.m_precision;
  doc["mIoU"] = m.m_iou;
  json pc = json::array();
  for (double v : per_class) {
    if (v < 0.0)
      pc.push_back(nullptr);
    else
      pc.push_back(v);
  }
  doc["per_class"] = pc;
  return doc;
}

// -------- subcommand implementations ----------------------------------

struct RenderArgs {
  std::string scene;
  std::string outdir;
  uint32_t height = 512;
  uint32_t width = 1024;
  pbv_grid_spec grid{500, 500, 10.0, 10.0};
};

int run_render(const RenderArgs& a) {
  pbv_scene* scene_raw = nullptr;
  check(pbv_scene_load(a.scene.c_str(), &scene_raw), a.scene.c_str());
  ScenePtr scene(scene_raw);
  fs::create_directories(a.outdir);
  fs::path dir(a.outdir);

  pbv_tensor *rgb = nullptr, *depth = nullptr, *semantic = nullptr;
  check(pbv_scene_render(scene.get(), a.height, a.width, &rgb, &depth,
                         &semantic),
        "render");
  TensorPtr rgb_p(rgb), depth_p(depth), semantic_p(semantic);

  std::vector<fs::path> artifacts;
  fs::path rgb_path = dir / "rgb.ppm";
  fs::path depth_path = dir / "depth.pgm";
  fs::path sem_path = dir / "semantic.pbt";
  check(pbv_image_write_ppm(rgb_p.get(), rgb_path.string().c_str()),
        "write rgb");
  check(pbv_depth_write_pgm(depth_p.get(), depth_path.string().c_str()),
        "write depth");
  write_pbt(semantic_p.get(), sem_path);
  artifacts = {rgb_path, depth_path, sem_path};

  pbv_bev* gt = nullptr;
  check(pbv_scene_gt_bev(scene.get(), &a.grid, &gt), "ground-truth bev");
  BevPtr gt_p(gt);
  write_bev_outputs(gt_p.get(), dir, "gt_bev", artifacts, "gt_bev.ppm");

  json extra;
  extra["height"] = a.height;
  extra["width"] = a.width;
  extra["grid"] = {{"cells_x", a.grid.cells_x},
                   {"cells_y", a.grid.cells_y},
                   {"range_x", a.grid.range_x},
                   {"range_y", a.grid.range_y}};
  write_manifest(dir, "render", artifacts, extra);
  std::printf("render: wrote %zu artifacts to %s\n", artifacts.size() + 1,
              a.outdir.c_str());
  return kExitOk;
}

struct ProjectArgs {
  std::string mode;
  std::string depth;
  std::string semantic;
  std::string cloud;
  std::string calib;
  std::string out;
  std::string out_labels;
  uint32_t height = 512;
  uint32_t width = 1024;
};

int run_project(const ProjectArgs& a) {
  if (a.mode == "depth2cloud") {
    pbv_tensor* depth = nullptr;
    check(pbv_depth_read_pgm(a.depth.c_str(), &depth), a.depth.c_str());
    TensorPtr depth_p(depth);
    TensorPtr sem;
    if (!a.semantic.empty()) sem = read_pbt(a.semantic);
    pbv_cloud* cloud = nullptr;
    check(pbv_depth_to_points(depth_p.get(), sem.get(), &cloud),
          "depth_to_points");
    CloudPtr cloud_p(cloud);
    check(pbv_cloud_write_ply(cloud_p.get(), a.out.c_str()), "write ply");
    std::printf("project: %zu points -> %s\n", pbv_cloud_size(cloud_p.get()),
                a.out.c_str());
    return kExitOk;
  }
  if (a.mode == "lidar2pano") {
    pbv_cloud* cloud = nullptr;
    check(pbv_cloud_read_ply(a.cloud.c_str(), &cloud), a.cloud.c_str());
    CloudPtr cloud_p(cloud);
    CalibPtr calib;
    if (!a.calib.empty()) {
      pbv_calibration* c = nullptr;
      check(pbv_calibration_read_json(a.calib.c_str(), &c), a.calib.c_str());
      calib.reset(c);
    }
    pbv_tensor* depth = nullptr;
    pbv_tensor* labels = nullptr;
    size_t skipped = 0;
    check(pbv_lidar_to_panorama(cloud_p.get(), calib.get(), a.height, a.width,
                                &depth, &labels, &skipped),
          "lidar_to_panorama");
    TensorPtr depth_p(depth), labels_p(labels);
    check(pbv_depth_write_pgm(depth_p.get(), a.out.c_str()), "write pgm");
    if (!a.out_labels.empty()) {
      if (!labels_p) {
        std::fprintf(stderr, "panobev: cloud has no labels for %s\n",
                     a.out_labels.c_str());
        return kExitInput;
      }
      write_pbt(labels_p.get(), a.out_labels);
    }
    std::printf("project: %zu points -> %s (%zu skipped)\n",
                pbv_cloud_size(cloud_p.get()), a.out.c_str(), skipped);
    return kExitOk;
  }
  std::fprintf(stderr, "panobev: unknown --mode %s\n", a.mode.c_str());
  return kExitInput;
}

struct RasterizeArgs {
  std::string cloud;
  std::string out_prefix;
  std::string exclude;
  std::string vis;
  pbv_grid_spec grid{500, 500, 10.0, 10.0};
};

int run_rasterize(const RasterizeArgs& a) {
  pbv_cloud* cloud = nullptr;
  check(pbv_cloud_read_ply(a.cloud.c_str(), &cloud), a.cloud.c_str());
  CloudPtr cloud_p(cloud);
  if (!a.exclude.empty()) {
    std::vector<uint8_t> ex = parse_class_list(a.exclude);
    pbv_cloud* filtered = nullptr;
    check(pbv_cloud_filter_classes(cloud_p.get(), ex.data(), ex.size(),
                                   &filtered),
          "filter classes");
    cloud_p.reset(filtered);
  }
  pbv_bev* bev = nullptr;
  check(pbv_rasterize(cloud_p.get(), &a.grid, &bev), "rasterize");
  BevPtr bev_p(bev);
  fs::path prefix(a.out_prefix);
  fs::path dir = prefix.parent_path().empty() ? fs::path(".")
                                              : prefix.parent_path();
  fs::create_directories(dir);
  std::vector<fs::path> artifacts;
  write_bev_outputs(bev_p.get(), dir, prefix.filename().string(), artifacts);
  if (!a.vis.empty()) {
    pbv_tensor* labels = nullptr;
    check(pbv_bev_labels(bev_p.get(), &labels), "bev labels");
    TensorPtr labels_p(labels);
    TensorPtr vis = labels_to_vis(labels_p.get());
    check(pbv_image_write_ppm(vis.get(), a.vis.c_str()), "write vis");
  }
  std::printf("rasterize: %zu observed cells -> %s.*\n",
              pbv_bev_observed_count(bev_p.get()), a.out_prefix.c_str());
  return kExitOk;
}

struct EvalArgs {
  std::string pred;
  std::string gt;
  uint32_t classes = 21;
  bool exclude_void = false;
  std::string out;
};

int run_eval(const EvalArgs& a) {
  BevPtr pred = load_bev_prefix(a.pred);
  BevPtr gt = load_bev_prefix(a.gt);
  pbv_metrics m{};
  std::vector<double> per_class(a.classes, -1.0);
  check(pbv_bev_metrics(pred.get(), gt.get(), a.classes,
                        a.exclude_void ? 0 : 1, &m, per_class.data()),
        "metrics");
  json doc = metrics_json(m, per_class);
  std::string text = doc.dump(2) + "\n";
  std::fputs(text.c_str(), stdout);
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    f << text;
  }
  return kExitOk;
}

struct AttendArgs {
  std::string queries;
  std::string points;
  std::string features;
  std::string params;
  std::string out_prefix;
  uint32_t n_ref = 4;
  uint64_t seed = 0;
  double randomize = 0.0;
  bool grad_check = false;
  pbv_grid_spec grid{500, 500, 10.0, 10.0};
};

int run_attend(const AttendArgs& a) {
  fs::path prefix(a.out_prefix);
  fs::path dir = prefix.parent_path().empty() ? fs::path(".")
                                              : prefix.parent_path();
  fs::create_directories(dir);
  std::string stem = (dir / prefix.filename()).string();

  json summary;
  if (!a.queries.empty()) {
    TensorPtr q = read_pbt(a.queries);
    TensorPtr f = read_pbt(a.features);
    CloudPtr cloud_p;
    if (fs::path(a.points).extension() == ".pbt") {
      // N x 3 f32 tensor of reference points
      TensorPtr pts = read_pbt(a.points);
      uint32_t pdims[4];
      pbv_tensor_dims(pts.get(), pdims);
      if (pbv_tensor_ndim(pts.get()) != 2 || pdims[1] != 3 ||
          pbv_tensor_dtype(pts.get()) != PBV_DTYPE_F32) {
        std::fprintf(stderr, "panobev: %s must be an Nx3 f32 tensor\n",
                     a.points.c_str());
        return kExitInput;
      }
      const float* pv = static_cast<const float*>(pbv_tensor_data(pts.get()));
      std::vector<double> xyz(static_cast<size_t>(pdims[0]) * 3);
      for (size_t i = 0; i < xyz.size(); ++i) xyz[i] = pv[i];
      pbv_cloud* cloud = nullptr;
      check(pbv_cloud_create(xyz.data(), nullptr, pdims[0], &cloud),
            "points tensor");
      cloud_p.reset(cloud);
    } else {
      pbv_cloud* cloud = nullptr;
      check(pbv_cloud_read_ply(a.points.c_str(), &cloud), a.points.c_str());
      cloud_p.reset(cloud);
    }

    uint32_t qdims[4];
    pbv_tensor_dims(q.get(), qdims);
    AttnPtr params;
    if (!a.params.empty()) {
      pbv_attention* p = nullptr;
      check(pbv_attention_load(a.params.c_str(), &p), a.params.c_str());
      params.reset(p);
    } else {
      pbv_attention* p = nullptr;
      check(pbv_attention_init(qdims[1], a.n_ref, a.seed, &p), "init params");
      params.reset(p);
      if (a.randomize > 0.0)
        check(pbv_attention_randomize(params.get(), a.seed, a.randomize),
              "randomize params");
    }
    check(pbv_attention_save(params.get(), (stem + ".params.pbt").c_str()),
          "save params");

    pbv_tensor *out = nullptr, *weights = nullptr, *rows = nullptr;
    check(pbv_attention_forward(params.get(), q.get(), cloud_p.get(), nullptr,
                                &a.grid, f.get(), &out, &weights, &rows),
          "attention forward");
    TensorPtr out_p(out), weights_p(weights), rows_p(rows);
    write_pbt(out_p.get(), stem + ".output.pbt");
    write_pbt(weights_p.get(), stem + ".weights.pbt");
    write_pbt(rows_p.get(), stem + ".rows.pbt");
    uint32_t odims[4];
    pbv_tensor_dims(out_p.get(), odims);
    summary["queries_kept"] = odims[0];
    summary["channels"] = odims[1];
  }

  if (a.grad_check) {
    double max_rel_err = 0.0;
    size_t checked = 0;
    check(pbv_attention_grad_check(4, 8, 4, 8, 16, a.seed, 1e-4, &max_rel_err,
                                   &checked),
          "grad check");
    json gc;
    gc["max_rel_err"] = max_rel_err;
    gc["checked"] = checked;
    gc["tolerance"] = 1e-4;
    gc["pass"] = max_rel_err <= 1e-4;
    std::ofstream f(stem + ".gradcheck.json",
                    std::ios::binary | std::ios::trunc);
    f << gc.dump(2) << "\n";
    summary["grad_check"] = gc;
    if (max_rel_err > 1e-4) {
      std::fputs((summary.dump(2) + "\n").c_str(), stdout);
      return kExitThreshold;
    }
  }
  std::fputs((summary.dump(2) + "\n").c_str(), stdout);
  return kExitOk;
}

struct AugmentArgs {
  std::string rgb;
  std::string depth;
  std::string semantic;
  std::string bev_prefix;
  std::string mix_rgb;
  std::string mix_bev_prefix;
  std::string spec;
  std::string outdir;
  uint64_t sample_id = 0;
  int64_t seed_override = -1;
};

int run_augment(const AugmentArgs& a) {
  std::ifstream spec_in(a.spec, std::ios::binary);
  if (!spec_in.good()) {
    std::fprintf(stderr, "panobev: cannot open %s\n", a.spec.c_str());
    return kExitInput;
  }
  std::string spec_text((std::istreambuf_iterator<char>(spec_in)),
                        std::istreambuf_iterator<char>());
  if (a.seed_override >= 0) {
    json doc = json::parse(spec_text, nullptr, false);
    if (doc.is_discarded()) {
      std::fprintf(stderr, "panobev: %s is not valid JSON\n", a.spec.c_str());
      return kExitInput;
    }
    doc["seed"] = static_cast<uint64_t>(a.seed_override);
    spec_text = doc.dump();
  }

  TensorPtr rgb, depth, semantic, mix_rgb;
  BevPtr bev, mix_bev;
  if (!a.rgb.empty()) {
    pbv_tensor* t = nullptr;
    check(pbv_image_read_ppm(a.rgb.c_str(), &t), a.rgb.c_str());
    rgb.reset(t);
  }
  if (!a.depth.empty()) {
    pbv_tensor* t = nullptr;
    check(pbv_depth_read_pgm(a.depth.c_str(), &t), a.depth.c_str());
    depth.reset(t);
  }
  if (!a.semantic.empty()) semantic = read_pbt(a.semantic);
  if (!a.bev_prefix.empty()) bev = load_bev_prefix(a.bev_prefix);
  if (!a.mix_rgb.empty()) {
    pbv_tensor* t = nullptr;
    check(pbv_image_read_ppm(a.mix_rgb.c_str(), &t), a.mix_rgb.c_str());
    mix_rgb.reset(t);
  }
  if (!a.mix_bev_prefix.empty()) mix_bev = load_bev_prefix(a.mix_bev_prefix);

  pbv_tensor *rgb_out = nullptr, *depth_out = nullptr, *sem_out = nullptr;
  pbv_bev* bev_out = nullptr;
  char* metadata = nullptr;
  check(pbv_joint_augment(rgb.get(), depth.get(), semantic.get(), bev.get(),
                          mix_rgb.get(), mix_bev.get(), spec_text.c_str(),
                          a.sample_id, &rgb_out, &depth_out, &sem_out,
                          &bev_out, &metadata),
        "joint augment");
  TensorPtr rgb_p(rgb_out), depth_p(depth_out), sem_p(sem_out);
  BevPtr bev_p(bev_out);

  fs::create_directories(a.outdir);
  fs::path dir(a.outdir);
  std::vector<fs::path> artifacts;
  if (rgb_p) {
    fs::path p = dir / "rgb.ppm";
    check(pbv_image_write_ppm(rgb_p.get(), p.string().c_str()), "write rgb");
    artifacts.push_back(p);
  }
  if (depth_p) {
    fs::path p = dir / "depth.pgm";
    check(pbv_depth_write_pgm(depth_p.get(), p.string().c_str()),
          "write depth");
    artifacts.push_back(p);
  }
  if (sem_p) {
    fs::path p = dir / "semantic.pbt";
    write_pbt(sem_p.get(), p);
    artifacts.push_back(p);
  }
  if (bev_p) write_bev_outputs(bev_p.get(), dir, "gt_bev", artifacts);
  {
    fs::path p = dir / "metadata.json";
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << metadata;
    artifacts.push_back(p);
  }
  pbv_string_free(metadata);
  write_manifest(dir, "augment", artifacts);
  std::printf("augment: wrote %zu artifacts to %s\n", artifacts.size() + 1,
              a.outdir.c_str());
  return kExitOk;
}

struct RotateArgs {
  std::string input;
  std::string out;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  std::string interp = "nearest";
};

int run_rotate(const RotateArgs& a) {
  std::string ext = fs::path(a.input).extension().string();
  TensorPtr img;
  if (ext == ".ppm") {
    pbv_tensor* t = nullptr;
    check(pbv_image_read_ppm(a.input.c_str(), &t), a.input.c_str());
    img.reset(t);
  } else if (ext == ".pgm") {
    pbv_tensor* t = nullptr;
    check(pbv_depth_read_pgm(a.input.c_str(), &t), a.input.c_str());
    img.reset(t);
  } else if (ext == ".pbt") {
    img = read_pbt(a.input);
  } else {
    std::fprintf(stderr, "panobev: unsupported input %s\n", a.input.c_str());
    return kExitInput;
  }
  double deg2rad = M_PI / 180.0;
  pbv_interp interp = a.interp == "bilinear" ? PBV_INTERP_BILINEAR
                                             : PBV_INTERP_NEAREST;
  pbv_tensor* out = nullptr;
  check(pbv_rotate_panorama(img.get(), a.pitch_deg * deg2rad,
                            a.roll_deg * deg2rad, interp, &out),
        "rotate");
  TensorPtr out_p(out);
  std::string oext = fs::path(a.out).extension().string();
  if (oext == ".ppm")
    check(pbv_image_write_ppm(out_p.get(), a.out.c_str()), "write ppm");
  else if (oext == ".pgm")
    check(pbv_depth_write_pgm(out_p.get(), a.out.c_str()), "write pgm");
  else
    write_pbt(out_p.get(), a.out);
  std::printf("rotate: %s -> %s\n", a.input.c_str(), a.out.c_str());
  return kExitOk;
}

struct DemoArgs {
  std::string scene;
  std::string outdir;
  uint32_t height = 512;
  uint32_t width = 1024;
  double min_agreement = 0.95;
  pbv_grid_spec grid{500, 500, 10.0, 10.0};
};

int run_demo(const DemoArgs& a) {
  pbv_scene* scene_raw = nullptr;
  check(pbv_scene_load(a.scene.c_str(), &scene_raw), a.scene.c_str());
  ScenePtr scene(scene_raw);

  pbv_tensor *depth = nullptr, *semantic = nullptr;
  check(pbv_scene_render(scene.get(), a.height, a.width, nullptr, &depth,
                         &semantic),
        "render");
  TensorPtr depth_p(depth), semantic_p(semantic);

  pbv_cloud* cloud = nullptr;
  check(pbv_depth_to_points(depth_p.get(), semantic_p.get(), &cloud),
        "depth_to_points");
  CloudPtr cloud_p(cloud);

  // The BEV ground truth models floor and box tops; drop ceiling and
  // wall returns before rasterizing.
  const uint8_t overhead[2] = {2, 3};
  pbv_cloud* filtered = nullptr;
  check(pbv_cloud_filter_classes(cloud_p.get(), overhead, 2, &filtered),
        "filter classes");
  CloudPtr filtered_p(filtered);

  pbv_bev* raster = nullptr;
  check(pbv_rasterize(filtered_p.get(), &a.grid, &raster), "rasterize");
  BevPtr raster_p(raster);

  pbv_bev* gt = nullptr;
  check(pbv_scene_gt_bev(scene.get(), &a.grid, &gt), "ground-truth bev");
  BevPtr gt_p(gt);

  double agreement = 0.0;
  check(pbv_bev_agreement(raster_p.get(), gt_p.get(), &agreement),
        "agreement");

  if (!a.outdir.empty()) {
    fs::create_directories(a.outdir);
    fs::path dir(a.outdir);
    std::vector<fs::path> artifacts;
    write_bev_outputs(raster_p.get(), dir, "raster_bev", artifacts,
                      "raster_bev.ppm");
    write_bev_outputs(gt_p.get(), dir, "gt_bev", artifacts, "gt_bev.ppm");
    write_manifest(dir, "demo-pipeline", artifacts);
  }

  json doc;
  doc["observed_cells"] = pbv_bev_observed_count(raster_p.get());
  doc["agreement"] = agreement;
  doc["threshold"] = a.min_agreement;
  doc["pass"] = agreement >= a.min_agreement;
  std::fputs((doc.dump(2) + "\n").c_str(), stdout);
  return agreement >= a.min_agreement ? kExitOk : kExitThreshold;
}

void add_grid_flags(CLI::App* cmd, pbv_grid_spec* grid) {
  cmd->add_option("--cells", grid->cells_x, "BEV cells per side")
      ->default_val(500);
  cmd->add_option("--range", grid->range_x, "BEV range in meters per side")
      ->default_val(10.0);
  cmd->parse_complete_callback([grid] {
    grid->cells_y = grid->cells_x;
    grid->range_y = grid->range_x;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panobev: panoramic/LiDAR cross-modal BEV geometry"};
  app.set_version_flag("--version", std::string(pbv_version()));
  app.require_subcommand(1);

  RenderArgs render_args;
  CLI::App* render = app.add_subcommand("render",
                                        "ray-cast a scene into panoramas");
  render->add_option("--scene", render_args.scene, "scene JSON")->required();
  render->add_option("--out", render_args.outdir, "output directory")
      ->required();
  render->add_option("--height", render_args.height, "panorama height");
  render->add_option("--width", render_args.width, "panorama width");
  add_grid_flags(render, &render_args.grid);

  ProjectArgs project_args;
  CLI::App* project =
      app.add_subcommand("project", "cross-modal projections");
  project->add_option("--mode", project_args.mode,
                      "depth2cloud or lidar2pano")
      ->required();
  project->add_option("--depth", project_args.depth, "depth PGM input");
  project->add_option("--semantic", project_args.semantic,
                      "semantic PBT input");
  project->add_option("--cloud", project_args.cloud, "PLY input");
  project->add_option("--calib", project_args.calib, "calibration JSON");
  project->add_option("--height", project_args.height, "panorama height");
  project->add_option("--width", project_args.width, "panorama width");
  project->add_option("--out", project_args.out, "output path")->required();
  project->add_option("--out-labels", project_args.out_labels,
                      "label panorama PBT output");

  RasterizeArgs raster_args;
  CLI::App* rasterize =
      app.add_subcommand("rasterize", "labeled cloud to BEV map");
  rasterize->add_option("--cloud", raster_args.cloud, "labeled PLY input")
      ->required();
  rasterize->add_option("--out-prefix", raster_args.out_prefix,
                        "output prefix for .labels/.mask/.heights.pbt")
      ->required();
  rasterize->add_option("--exclude-classes", raster_args.exclude,
                        "comma-separated class ids to drop");
  rasterize->add_option("--vis", raster_args.vis, "palette PPM output");
  add_grid_flags(rasterize, &raster_args.grid);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "score BEV prediction vs gt");
  eval->add_option("--pred", eval_args.pred, "prediction BEV prefix")
      ->required();
  eval->add_option("--gt", eval_args.gt, "ground-truth BEV prefix")
      ->required();
  eval->add_option("--classes", eval_args.classes, "class count");
  eval->add_flag("--exclude-void", eval_args.exclude_void,
                 "drop class 0 from the means");
  eval->add_option("--out", eval_args.out, "report JSON path");

  AttendArgs attend_args;
  CLI::App* attend =
      app.add_subcommand("attend", "PD attention forward / grad check");
  attend->add_option("--queries", attend_args.queries, "queries PBT (NxC)");
  attend->add_option("--points", attend_args.points,
                     "reference points PLY (camera frame)");
  attend->add_option("--features", attend_args.features,
                     "feature map PBT (CxHxW)");
  attend->add_option("--params", attend_args.params, "params PBT");
  attend->add_option("--out-prefix", attend_args.out_prefix, "output prefix")
      ->required();
  attend->add_option("--n-ref", attend_args.n_ref, "samples per query");
  attend->add_option("--seed", attend_args.seed, "parameter seed");
  attend->add_option("--randomize", attend_args.randomize,
                     "randomize params with this scale");
  attend->add_flag("--grad-check", attend_args.grad_check,
                   "run the finite-difference gradient check");
  add_grid_flags(attend, &attend_args.grid);

  AugmentArgs augment_args;
  CLI::App* augment =
      app.add_subcommand("augment", "joint panorama/BEV augmentation");
  augment->add_option("--rgb", augment_args.rgb, "RGB PPM input");
  augment->add_option("--depth", augment_args.depth, "depth PGM input");
  augment->add_option("--semantic", augment_args.semantic,
                      "semantic PBT input");
  augment->add_option("--bev-prefix", augment_args.bev_prefix,
                      "BEV input prefix");
  augment->add_option("--mix-rgb", augment_args.mix_rgb,
                      "partner RGB for mixing");
  augment->add_option("--mix-bev-prefix", augment_args.mix_bev_prefix,
                      "partner BEV prefix for mixing");
  augment->add_option("--spec", augment_args.spec, "augment spec JSON")
      ->required();
  augment->add_option("--out", augment_args.outdir, "output directory")
      ->required();
  augment->add_option("--sample-id", augment_args.sample_id,
                      "per-sample stream id");
  augment->add_option("--seed", augment_args.seed_override,
                      "override the spec seed");

  RotateArgs rotate_args;
  CLI::App* rotate =
      app.add_subcommand("rotate", "pitch/roll panorama disturbance");
  rotate->add_option("--input", rotate_args.input, "PPM, PGM or PBT input")
      ->required();
  rotate->add_option("--out", rotate_args.out, "output path")->required();
  rotate->add_option("--pitch", rotate_args.pitch_deg, "pitch in degrees");
  rotate->add_option("--roll", rotate_args.roll_deg, "roll in degrees");
  rotate->add_option("--interp", rotate_args.interp,
                     "nearest or bilinear (depth: nearest only)");

  DemoArgs demo_args;
  CLI::App* demo = app.add_subcommand(
      "demo-pipeline", "render -> back-project -> rasterize -> score vs gt");
  demo->add_option("--scene", demo_args.scene, "scene JSON")->required();
  demo->add_option("--out", demo_args.outdir, "optional output directory");
  demo->add_option("--height", demo_args.height, "panorama height");
  demo->add_option("--width", demo_args.width, "panorama width");
  demo->add_option("--min-agreement", demo_args.min_agreement,
                   "pass threshold");
  add_grid_flags(demo, &demo_args.grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  if (render->parsed()) return run_render(render_args);
  if (project->parsed()) return run_project(project_args);
  if (rasterize->parsed()) return run_rasterize(raster_args);
  if (eval->parsed()) return run_eval(eval_args);
  if (attend->parsed()) return run_attend(attend_args);
  if (augment->parsed()) return run_augment(augment_args);
  if (rotate->parsed()) return run_rotate(rotate_args);
  if (demo->parsed()) return run_demo(demo_args);
  return kExitInput;
}
