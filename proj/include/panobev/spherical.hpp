#pragma once

#include <cstdint>
#include <utility>

#include "panobev/geometry.hpp"
#include "panobev/image.hpp"

namespace panobev {

// Viewing-ray direction in spherical coordinates: phi is azimuth, theta
// the polar angle measured from +z (zenith). Stored with phi normalized
// to (-pi, pi]; azimuth_0_2pi() gives the [0, 2pi) form used by the
// equirectangular index mapping.
struct SphericalAngle {
  double phi = 0.0;
  double theta = 0.0;

  double azimuth_0_2pi() const {
    double a = phi;
    if (a < 0.0) a += 2.0 * M_PI;
    if (a >= 2.0 * M_PI) a = 0.0;
    return a;
  }
};

struct PixelIndex {
  int32_t row = 0;
  int32_t col = 0;

  bool operator==(const PixelIndex&) const = default;
};

// Pitch/roll disturbance rotation R(alpha, beta, 0); composed as
// roll about x (forward) after pitch about y (left), camera axes.
struct RotationPR {
  double pitch = 0.0;
  double roll = 0.0;
  Mat3 matrix;
};

// phi = atan2(y, x), theta = atan2(hypot(x, y), z); requires a nonzero
// finite point.
SphericalAngle cart_to_sph(const Vec3& p);

// (r sin(theta) cos(phi), r sin(theta) sin(phi), r cos(theta)); r > 0.
Vec3 sph_to_cart(const SphericalAngle& a, double radius);

// Raw equirectangular ceiling indices: ih = ceil(H*theta/pi),
// iw = ceil((phi/pi - 1/W) * W/2) with phi taken in [0, 2pi).
// These are the 1-based-looking values before the 0-based mapping.
std::pair<int64_t, int64_t> sph_to_pixel_raw(const SphericalAngle& a,
                                             uint32_t height, uint32_t width);

// 0-based index: row = clamp(ih - 1, 0, H-1); col = (iw - 1) mod W.
// Total on finite angles: theta is clamped into [0, pi], phi wrapped.
PixelIndex sph_to_pixel(const SphericalAngle& a, uint32_t height,
                        uint32_t width);

// Pixel-center inverse; sph_to_pixel(pixel_to_sph(i)) == i for every
// in-bounds index.
SphericalAngle pixel_to_sph(const PixelIndex& idx, uint32_t height,
                            uint32_t width);

RotationPR rotation_pr(double pitch, double roll);

enum class Interp { nearest, bilinear };

// Inverse-warp resampling of an equirectangular image under a pitch/roll
// disturbance: output pixel (r, c) samples the input along direction
// R^T * dir(r, c). Depth must use nearest (no blending across returns).
PanoramaImage rotate_panorama(const PanoramaImage& img, const RotationPR& rot,
                              Interp interp);
DepthPanorama rotate_panorama(const DepthPanorama& depth,
                              const RotationPR& rot, Interp interp);
SemanticPanorama rotate_panorama(const SemanticPanorama& sem,
                                 const RotationPR& rot, Interp interp);

}  // namespace panobev
