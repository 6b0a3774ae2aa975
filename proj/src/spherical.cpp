#include "panobev/spherical.hpp"

#include <algorithm>
#include <cmath>

#include "panobev/errors.hpp"
#include "panobev/threading.hpp"

namespace panobev {

namespace {

double wrap_0_2pi(double a) {
  double w = std::fmod(a, 2.0 * M_PI);
  if (w < 0.0) w += 2.0 * M_PI;
  if (w >= 2.0 * M_PI) w = 0.0;
  return w;
}

int64_t mod_floor(int64_t v, int64_t m) {
  int64_t r = v % m;
  return r < 0 ? r + m : r;
}

}  // namespace

SphericalAngle cart_to_sph(const Vec3& p) {
  require(p.finite(), ErrorCode::invalid_argument,
          "cart_to_sph: non-finite component");
  double planar = std::hypot(p.x, p.y);
  require(planar > 0.0 || p.z != 0.0, ErrorCode::invalid_argument,
          "cart_to_sph: zero vector is degenerate");
  SphericalAngle a;
  a.phi = (planar == 0.0) ? 0.0 : std::atan2(p.y, p.x);
  if (a.phi <= -M_PI) a.phi = M_PI;  // atan2 may return -pi; keep (-pi, pi]
  a.theta = std::atan2(planar, p.z);
  return a;
}

Vec3 sph_to_cart(const SphericalAngle& a, double radius) {
  require(std::isfinite(radius) && radius > 0.0, ErrorCode::invalid_argument,
          "sph_to_cart: radius must be positive");
  double st = std::sin(a.theta);
  return {radius * st * std::cos(a.phi), radius * st * std::sin(a.phi),
          radius * std::cos(a.theta)};
}

std::pair<int64_t, int64_t> sph_to_pixel_raw(const SphericalAngle& a,
                                             uint32_t height, uint32_t width) {
  require(height > 0 && width > 0, ErrorCode::invalid_argument,
          "sph_to_pixel: H, W must be positive");
  double theta = std::clamp(a.theta, 0.0, M_PI);
  double phi = wrap_0_2pi(a.phi);
  double h = static_cast<double>(height);
  double w = static_cast<double>(width);
  int64_t ih = static_cast<int64_t>(std::ceil(h * theta / M_PI));
  int64_t iw = static_cast<int64_t>(std::ceil((phi / M_PI - 1.0 / w) * w / 2.0));
  return {ih, iw};
}

PixelIndex sph_to_pixel(const SphericalAngle& a, uint32_t height,
                        uint32_t width) {
  auto [ih, iw] = sph_to_pixel_raw(a, height, width);
  int64_t row = std::clamp<int64_t>(ih - 1, 0, static_cast<int64_t>(height) - 1);
  int64_t col = mod_floor(iw - 1, static_cast<int64_t>(width));
  return {static_cast<int32_t>(row), static_cast<int32_t>(col)};
}

SphericalAngle pixel_to_sph(const PixelIndex& idx, uint32_t height,
                            uint32_t width) {
  require(height > 0 && width > 0, ErrorCode::invalid_argument,
          "pixel_to_sph: H, W must be positive");
  require(idx.row >= 0 && idx.col >= 0 &&
              idx.row < static_cast<int32_t>(height) &&
              idx.col < static_cast<int32_t>(width),
          ErrorCode::invalid_argument, "pixel_to_sph: index out of bounds");
  SphericalAngle a;
  a.theta = (idx.row + 0.5) * M_PI / height;
  double phi = (idx.col + 1.0) * 2.0 * M_PI / width;  // band center, (0, 2pi]
  a.phi = phi > M_PI ? phi - 2.0 * M_PI : phi;
  return a;
}

RotationPR rotation_pr(double pitch, double roll) {
  require(std::isfinite(pitch) && std::isfinite(roll),
          ErrorCode::invalid_argument, "rotation_pr: non-finite angle");
  double ca = std::cos(pitch), sa = std::sin(pitch);
  double cb = std::cos(roll), sb = std::sin(roll);
  Mat3 ry;  // pitch about y (left axis)
  ry.m = {ca, 0, sa, 0, 1, 0, -sa, 0, ca};
  Mat3 rx;  // roll about x (forward axis)
  rx.m = {1, 0, 0, 0, cb, -sb, 0, sb, cb};
  return {pitch, roll, rx * ry};
}

namespace {

// Continuous pixel coordinates whose integer points coincide with the
// pixel-center angles of pixel_to_sph.
inline double row_coord(double theta, uint32_t height) {
  return theta * height / M_PI - 0.5;
}
inline double col_coord(double phi_0_2pi, uint32_t width) {
  return phi_0_2pi * width / (2.0 * M_PI) - 1.0;
}

// Bilinear sample with azimuthal wrap on columns and clamp on rows.
template <typename Get>
double bilinear_wrap(Get&& get, uint32_t height, uint32_t width, double r,
                     double c) {
  double rc = std::clamp(r, 0.0, static_cast<double>(height - 1));
  int64_t r0 = static_cast<int64_t>(std::floor(rc));
  int64_t r1 = std::min<int64_t>(r0 + 1, height - 1);
  double fr = rc - r0;
  double cw = c - width * std::floor(c / width);
  int64_t c0 = static_cast<int64_t>(std::floor(cw));
  if (c0 >= static_cast<int64_t>(width)) c0 = width - 1;
  int64_t c1 = (c0 + 1) % width;
  double fc = cw - c0;
  return (1.0 - fr) * ((1.0 - fc) * get(r0, c0) + fc * get(r0, c1)) +
         fr * ((1.0 - fc) * get(r1, c0) + fc * get(r1, c1));
}

// Shared warp loop: for each output pixel finds the source angle under
// the inverse rotation and delegates to a per-type sampler.
template <typename Write>
void warp(uint32_t height, uint32_t width, const RotationPR& rot,
          Write&& write) {
  Mat3 inv = rot.matrix.transposed();
  parallel_for(height, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      for (uint32_t c = 0; c < width; ++c) {
        PixelIndex out{static_cast<int32_t>(r), static_cast<int32_t>(c)};
        Vec3 dir = sph_to_cart(pixel_to_sph(out, height, width), 1.0);
        SphericalAngle src = cart_to_sph(inv * dir);
        write(out, src);
      }
    }
  });
}

}  // namespace

PanoramaImage rotate_panorama(const PanoramaImage& img, const RotationPR& rot,
                              Interp interp) {
  require(img.height >= 2 && img.width >= 2, ErrorCode::invalid_argument,
          "rotate_panorama: image must be at least 2x2");
  PanoramaImage out(img.height, img.width);
  warp(img.height, img.width, rot, [&](PixelIndex o, const SphericalAngle& s) {
    if (interp == Interp::nearest) {
      PixelIndex p = sph_to_pixel(s, img.height, img.width);
      for (uint32_t ch = 0; ch < 3; ++ch)
        out.at(o.row, o.col, ch) = img.at(p.row, p.col, ch);
    } else {
      double r = row_coord(s.theta, img.height);
      double c = col_coord(s.azimuth_0_2pi(), img.width);
      for (uint32_t ch = 0; ch < 3; ++ch) {
        double v = bilinear_wrap(
            [&](int64_t rr, int64_t cc) {
              return static_cast<double>(img.at(rr, cc, ch));
            },
            img.height, img.width, r, c);
        out.at(o.row, o.col, ch) =
            static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  });
  return out;
}

DepthPanorama rotate_panorama(const DepthPanorama& depth, const RotationPR& rot,
                              Interp interp) {
  require(depth.height >= 2 && depth.width >= 2, ErrorCode::invalid_argument,
          "rotate_panorama: image must be at least 2x2");
  require(interp == Interp::nearest, ErrorCode::invalid_argument,
          "rotate_panorama: depth supports nearest interpolation only");
  DepthPanorama out(depth.height, depth.width);
  warp(depth.height, depth.width, rot,
       [&](PixelIndex o, const SphericalAngle& s) {
         PixelIndex p = sph_to_pixel(s, depth.height, depth.width);
         out.at(o.row, o.col) = depth.at(p.row, p.col);
       });
  return out;
}

SemanticPanorama rotate_panorama(const SemanticPanorama& sem,
                                 const RotationPR& rot, Interp interp) {
  require(sem.height >= 2 && sem.width >= 2, ErrorCode::invalid_argument,
          "rotate_panorama: image must be at least 2x2");
  require(interp == Interp::nearest, ErrorCode::invalid_argument,
          "rotate_panorama: labels support nearest interpolation only");
  SemanticPanorama out(sem.height, sem.width);
  warp(sem.height, sem.width, rot,
       [&](PixelIndex o, const SphericalAngle& s) {
         PixelIndex p = sph_to_pixel(s, sem.height, sem.width);
         out.at(o.row, o.col) = sem.at(p.row, p.col);
       });
  return out;
}

}  // namespace panobev
