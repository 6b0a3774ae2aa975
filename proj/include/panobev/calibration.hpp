#pragma once

#include <array>
#include <string>

#include "panobev/geometry.hpp"

namespace panobev {

// Rigid transform taking LiDAR-frame points into the panoramic camera
// frame (4x4 homogeneous, meters). Construction validates the rotation
// block: orthonormal within 1e-6 Frobenius, det +1 within 1e-6, bottom
// row exactly (0,0,0,1).
struct CalibrationExtrinsic {
  Mat3 rotation;
  Vec3 translation;

  static constexpr double kOrthoTolerance = 1e-6;

  // Validates and adopts a row-major 4x4 matrix.
  static CalibrationExtrinsic from_matrix(const std::array<double, 16>& m);

  static CalibrationExtrinsic identity() { return {Mat3::identity(), {}}; }

  std::array<double, 16> matrix() const;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  CalibrationExtrinsic inverse() const {
    Mat3 rt = rotation.transposed();
    return {rt, -(rt * translation)};
  }
};

CalibrationExtrinsic read_calibration_json(const std::string& path);
CalibrationExtrinsic parse_calibration_json(const std::string& text);

}  // namespace panobev
