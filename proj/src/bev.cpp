#include "panobev/bev.hpp"

#include <cmath>

namespace panobev {

std::optional<CellIndex> grid_index(double x, double y,
                                    const BevGridSpec& grid) {
  double cx = std::floor((x + grid.range_x / 2.0) / grid.res_x());
  double cy = std::floor((y + grid.range_y / 2.0) / grid.res_y());
  if (cx < 0.0 || cy < 0.0 || cx >= grid.cells_x || cy >= grid.cells_y)
    return std::nullopt;
  return CellIndex{static_cast<uint32_t>(cy), static_cast<uint32_t>(cx)};
}

SemanticBevMap SemanticBevMap::from_tensors(const Tensor& labels,
                                            const Tensor* mask,
                                            const Tensor* heights) {
  require(labels.dtype() == DType::u8 && labels.ndim() == 2,
          ErrorCode::invalid_argument, "expected u8 labels grid");
  SemanticBevMap map(labels.dim(1), labels.dim(0));
  auto lv = labels.as<uint8_t>();
  map.labels.assign(lv.begin(), lv.end());
  if (mask) {
    require(mask->dtype() == DType::u8 && mask->dims() == labels.dims(),
            ErrorCode::invalid_argument, "mask grid must match labels grid");
    auto mv = mask->as<uint8_t>();
    map.mask.assign(mv.begin(), mv.end());
  } else {
    for (std::size_t i = 0; i < map.labels.size(); ++i)
      map.mask[i] = map.labels[i] != kUnobserved;
  }
  if (heights) {
    require(heights->dtype() == DType::f32 && heights->dims() == labels.dims(),
            ErrorCode::invalid_argument, "heights grid must match labels grid");
    auto hv = heights->as<float>();
    map.heights.assign(hv.begin(), hv.end());
  }
  for (std::size_t i = 0; i < map.labels.size(); ++i)
    if (!map.mask[i]) {
      map.labels[i] = kUnobserved;
      map.heights[i] = 0.0f;
    }
  return map;
}

SemanticBevMap rasterize_bev(const LabeledPointCloud& cloud,
                             const BevGridSpec& grid) {
  grid.validate();
  require(cloud.has_labels() || cloud.size() == 0,
          ErrorCode::invalid_argument, "rasterize_bev: cloud has no labels");
  SemanticBevMap map(grid.cells_x, grid.cells_y);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (!p.finite()) continue;
    auto cell = grid_index(p.x, p.y, grid);
    if (!cell) continue;
    std::size_t o = map.offset(cell->row, cell->col);
    float z = static_cast<float>(p.z);
    uint8_t label = cloud.labels[i];
    if (!map.mask[o] || z > map.heights[o] ||
        (z == map.heights[o] && label > map.labels[o])) {
      map.mask[o] = 1;
      map.heights[o] = z;
      map.labels[o] = label;
    }
  }
  return map;
}

MetricsReport bev_metrics(const std::vector<uint8_t>& pred,
                          const std::vector<uint8_t>& gt, uint32_t num_classes,
                          bool include_void) {
  require(pred.size() == gt.size(), ErrorCode::invalid_argument,
          "bev_metrics: grids differ in size");
  require(num_classes >= 1, ErrorCode::invalid_argument,
          "bev_metrics: need at least one class");
  const uint32_t L = num_classes;
  std::vector<uint64_t> confusion(static_cast<std::size_t>(L) * L, 0);
  uint64_t total = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    uint8_t g = gt[i];
    if (g == SemanticBevMap::kUnobserved) continue;  // evaluate gt cells only
    uint8_t p = pred[i];
    if (p == SemanticBevMap::kUnobserved) p = 0;  // unobserved counts as void
    require(g < L && p < L, ErrorCode::invalid_argument,
            "bev_metrics: label id exceeds class count");
    ++confusion[static_cast<std::size_t>(g) * L + p];
    ++total;
  }
  require(total > 0, ErrorCode::invalid_argument,
          "bev_metrics: no evaluated cells");

  MetricsReport report;
  report.per_class.resize(L);
  uint64_t diag = 0;
  double sum_iou = 0.0, sum_rec = 0.0, sum_pre = 0.0;
  uint32_t present = 0;
  for (uint32_t k = 0; k < L; ++k) {
    uint64_t tp = confusion[static_cast<std::size_t>(k) * L + k];
    uint64_t fn = 0, fp = 0;
    for (uint32_t j = 0; j < L; ++j) {
      if (j == k) continue;
      fn += confusion[static_cast<std::size_t>(k) * L + j];
      fp += confusion[static_cast<std::size_t>(j) * L + k];
    }
    diag += tp;
    ClassStats& cs = report.per_class[k];
    cs.present = (tp + fn) > 0;
    if (!cs.present) continue;
    cs.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    cs.precision =
        (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                      : 0.0;
    cs.iou = static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    if (k == 0 && !include_void) continue;
    sum_iou += cs.iou;
    sum_rec += cs.recall;
    sum_pre += cs.precision;
    ++present;
  }
  report.acc = static_cast<double>(diag) / static_cast<double>(total);
  if (present > 0) {
    report.m_iou = sum_iou / present;
    report.m_recall = sum_rec / present;
    report.m_precision = sum_pre / present;
  }
  return report;
}

MetricsReport bev_metrics(const SemanticBevMap& pred, const SemanticBevMap& gt,
                          uint32_t num_classes, bool include_void) {
  require(pred.cells_x == gt.cells_x && pred.cells_y == gt.cells_y,
          ErrorCode::invalid_argument, "bev_metrics: grids differ in shape");
  return bev_metrics(pred.labels, gt.labels, num_classes, include_void);
}

double label_agreement(const SemanticBevMap& pred, const SemanticBevMap& gt) {
  require(pred.cells_x == gt.cells_x && pred.cells_y == gt.cells_y,
          ErrorCode::invalid_argument,
          "label_agreement: grids differ in shape");
  std::size_t both = 0, match = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    if (!pred.mask[i] || !gt.mask[i]) continue;
    ++both;
    match += pred.labels[i] == gt.labels[i];
  }
  require(both > 0, ErrorCode::invalid_argument,
          "label_agreement: no jointly observed cells");
  return static_cast<double>(match) / static_cast<double>(both);
}

}  // namespace panobev
