#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "panobev/projection.hpp"
#include "panobev/tensor.hpp"

namespace panobev {

// Sensor-centered top-down grid; the reference configuration is
// 500x500 cells over 10m x 10m.
struct BevGridSpec {
  uint32_t cells_x = 500;
  uint32_t cells_y = 500;
  double range_x = 10.0;
  double range_y = 10.0;

  double res_x() const { return range_x / cells_x; }
  double res_y() const { return range_y / cells_y; }

  void validate() const {
    require(cells_x > 0 && cells_y > 0, ErrorCode::invalid_argument,
            "grid cells must be positive");
    require(range_x > 0.0 && range_y > 0.0, ErrorCode::invalid_argument,
            "grid range must be positive");
  }
};

struct CellIndex {
  uint32_t row = 0;  // y axis
  uint32_t col = 0;  // x axis

  bool operator==(const CellIndex&) const = default;
};

// Half-open cells [lo, hi): col = floor((x + range_x/2) / res_x), row
// analogous in y. Returns nullopt outside the window.
std::optional<CellIndex> grid_index(double x, double y,
                                    const BevGridSpec& grid);

// L-class label grid with occupancy mask and per-cell max height.
// labels/mask/heights are row-major [row][col] = [y][x].
struct SemanticBevMap {
  static constexpr uint8_t kUnobserved = 255;

  uint32_t cells_x = 0;
  uint32_t cells_y = 0;
  std::vector<uint8_t> labels;
  std::vector<uint8_t> mask;
  std::vector<float> heights;

  SemanticBevMap() = default;
  SemanticBevMap(uint32_t cx, uint32_t cy)
      : cells_x(cx), cells_y(cy),
        labels(static_cast<std::size_t>(cx) * cy, kUnobserved),
        mask(static_cast<std::size_t>(cx) * cy, 0),
        heights(static_cast<std::size_t>(cx) * cy, 0.0f) {}

  std::size_t cell_count() const {
    return static_cast<std::size_t>(cells_x) * cells_y;
  }
  std::size_t offset(uint32_t row, uint32_t col) const {
    return static_cast<std::size_t>(row) * cells_x + col;
  }

  void set(uint32_t row, uint32_t col, uint8_t label, float height) {
    std::size_t i = offset(row, col);
    labels[i] = label;
    mask[i] = 1;
    heights[i] = height;
  }
  void clear(uint32_t row, uint32_t col) {
    std::size_t i = offset(row, col);
    labels[i] = kUnobserved;
    mask[i] = 0;
    heights[i] = 0.0f;
  }
  bool observed(uint32_t row, uint32_t col) const {
    return mask[offset(row, col)] != 0;
  }

  std::size_t observed_count() const {
    std::size_t n = 0;
    for (uint8_t m : mask) n += m != 0;
    return n;
  }

  Tensor labels_tensor() const {
    return Tensor::from<uint8_t>({cells_y, cells_x},
                                 {labels.data(), labels.size()});
  }
  Tensor mask_tensor() const {
    return Tensor::from<uint8_t>({cells_y, cells_x},
                                 {mask.data(), mask.size()});
  }
  Tensor heights_tensor() const {
    return Tensor::from<float>({cells_y, cells_x},
                               {heights.data(), heights.size()});
  }

  static SemanticBevMap from_tensors(const Tensor& labels,
                                     const Tensor* mask = nullptr,
                                     const Tensor* heights = nullptr);
};

// Per-cell aggregation: mask true iff at least one in-window point,
// height = max z, label = label of the max-z point (z ties: larger class
// id wins). Order-independent; requires a labeled cloud.
SemanticBevMap rasterize_bev(const LabeledPointCloud& cloud,
                             const BevGridSpec& grid);

struct ClassStats {
  bool present = false;  // class occurs in gt over evaluated cells
  double iou = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};

struct MetricsReport {
  double acc = 0.0;
  double m_recall = 0.0;
  double m_precision = 0.0;
  double m_iou = 0.0;
  std::vector<ClassStats> per_class;
};

// Confusion-matrix metrics over cells observed in gt. Unobserved
// prediction cells count as the void class 0. Means run over classes
// present in gt; include_void=false drops class 0 from the means.
MetricsReport bev_metrics(const std::vector<uint8_t>& pred,
                          const std::vector<uint8_t>& gt, uint32_t num_classes,
                          bool include_void = true);
MetricsReport bev_metrics(const SemanticBevMap& pred, const SemanticBevMap& gt,
                          uint32_t num_classes, bool include_void = true);

// Fraction of cells observed in both maps whose labels agree; the
// consistency-triangle score. Errors when no cell is observed in both.
double label_agreement(const SemanticBevMap& pred, const SemanticBevMap& gt);

}  // namespace panobev
