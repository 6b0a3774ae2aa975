#pragma once

#include <string>

#include "panobev/image.hpp"
#include "panobev/projection.hpp"
#include "panobev/tensor.hpp"

namespace panobev {

// PBT binary tensor container:
//   magic "PBT1" | u8 dtype code | u8 ndim | ndim x u32 LE dims |
//   row-major little-endian payload.
Tensor read_pbt(const std::string& path);
void write_pbt(const Tensor& tensor, const std::string& path);

// Depth panoramas on disk are 16-bit binary PGM (P5), maxval 65535,
// big-endian samples, value = millimeters, 0 = no return.
DepthPanorama read_depth_pgm(const std::string& path);
void write_depth_pgm(const DepthPanorama& depth, const std::string& path);

// 8-bit binary PPM (P6) for RGB panoramas and visualizations.
PanoramaImage read_ppm(const std::string& path);
void write_ppm(const PanoramaImage& image, const std::string& path);

// ASCII PLY with float x, y, z and an optional uchar label property.
LabeledPointCloud read_ply_ascii(const std::string& path);
void write_ply_ascii(const LabeledPointCloud& cloud, const std::string& path);

}  // namespace panobev
