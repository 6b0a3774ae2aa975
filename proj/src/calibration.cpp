#include "panobev/calibration.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "panobev/errors.hpp"

namespace panobev {

CalibrationExtrinsic CalibrationExtrinsic::from_matrix(
    const std::array<double, 16>& m) {
  for (double v : m)
    require(std::isfinite(v), ErrorCode::format,
            "calibration: non-finite entry");
  require(m[12] == 0.0 && m[13] == 0.0 && m[14] == 0.0 && m[15] == 1.0,
          ErrorCode::calibration,
          "calibration: bottom row must be exactly (0,0,0,1)");
  CalibrationExtrinsic e;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) e.rotation(r, c) = m[4 * r + c];
    e.translation[r] = m[4 * r + 3];
  }
  double defect = e.rotation.orthonormality_defect();
  require(defect <= kOrthoTolerance, ErrorCode::calibration,
          "calibration: rotation block is not orthonormal (defect " +
              std::to_string(defect) + ")");
  require(std::abs(e.rotation.det() - 1.0) <= kOrthoTolerance,
          ErrorCode::calibration,
          "calibration: rotation determinant must be +1");
  return e;
}

std::array<double, 16> CalibrationExtrinsic::matrix() const {
  std::array<double, 16> m{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[4 * r + c] = rotation(r, c);
    m[4 * r + 3] = translation[r];
  }
  m[15] = 1.0;
  return m;
}

CalibrationExtrinsic parse_calibration_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format, std::string("calibration: invalid JSON: ") +
                                e.what());
  }
  require(doc.is_object() && doc.contains("T_cam_lidar"), ErrorCode::format,
          "calibration: missing key T_cam_lidar");
  const auto& arr = doc["T_cam_lidar"];
  require(arr.is_array() && arr.size() == 16, ErrorCode::format,
          "calibration: T_cam_lidar must hold 16 numbers (row-major 4x4)");
  if (doc.contains("units")) {
    std::string units = doc["units"].get<std::string>();
    require(units == "m" || units == "meters", ErrorCode::format,
            "calibration: units must be meters, found '" + units + "'");
  }
  std::array<double, 16> m{};
  for (std::size_t i = 0; i < 16; ++i) {
    require(arr[i].is_number(), ErrorCode::format,
            "calibration: non-numeric matrix entry");
    m[i] = arr[i].get<double>();
  }
  return CalibrationExtrinsic::from_matrix(m);
}

CalibrationExtrinsic read_calibration_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_calibration_json(ss.str());
}

}  // namespace panobev
