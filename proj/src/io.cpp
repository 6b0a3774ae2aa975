#include "panobev/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "panobev/errors.hpp"

namespace panobev {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  require(!in.bad(), ErrorCode::io, "read failure on " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::io, "cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  require(out.good(), ErrorCode::io, "write failure on " + path);
}

void put_u32_le(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

Tensor read_pbt(const std::string& path) {
  std::string bytes = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  require(bytes.size() >= 6, ErrorCode::format, path + ": truncated header");
  require(bytes.compare(0, 4, "PBT1") == 0, ErrorCode::format,
          path + ": bad magic, expected PBT1");
  uint8_t code = p[4];
  require(code <= 3, ErrorCode::format,
          path + ": unknown dtype code " + std::to_string(code));
  uint8_t ndim = p[5];
  require(ndim >= 1 && ndim <= 4, ErrorCode::format,
          path + ": ndim must be 1..4");
  std::size_t header = 6 + static_cast<std::size_t>(ndim) * 4;
  require(bytes.size() >= header, ErrorCode::format,
          path + ": truncated dims");
  std::vector<uint32_t> dims(ndim);
  for (uint8_t i = 0; i < ndim; ++i) {
    dims[i] = get_u32_le(p + 6 + 4 * i);
    require(dims[i] >= 1, ErrorCode::format, path + ": zero dim");
  }
  Tensor t(static_cast<DType>(code), dims);
  require(bytes.size() == header + t.byte_size(), ErrorCode::format,
          path + ": payload length mismatch, expected " +
              std::to_string(t.byte_size()) + " bytes, found " +
              std::to_string(bytes.size() - header));
  // Payload is little-endian on disk; decode per element width.
  std::size_t n = t.element_count();
  std::size_t w = dtype_size(t.dtype());
  auto* dst = reinterpret_cast<unsigned char*>(t.raw());
  const unsigned char* src = p + header;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < w; ++b) dst[i * w + b] = src[i * w + b];
  return t;
}

void write_pbt(const Tensor& tensor, const std::string& path) {
  std::string out;
  out.reserve(6 + 4 * tensor.ndim() + tensor.byte_size());
  out += "PBT1";
  out.push_back(static_cast<char>(tensor.dtype()));
  out.push_back(static_cast<char>(tensor.ndim()));
  for (uint32_t d : tensor.dims()) put_u32_le(out, d);
  // Little-endian payload; this writes bytes in memory order, which is
  // LE on every supported target.
  out.append(reinterpret_cast<const char*>(tensor.raw()), tensor.byte_size());
  write_file(path, out);
}

namespace {

// Netpbm header tokenizer: skips whitespace and '#' comments.
struct PnmCursor {
  const std::string& bytes;
  std::size_t pos = 0;

  std::string token(const std::string& path) {
    while (pos < bytes.size()) {
      char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[pos])))
      ++pos;
    require(pos > start, ErrorCode::format, path + ": truncated header");
    return bytes.substr(start, pos - start);
  }

  uint32_t number(const std::string& path) {
    std::string t = token(path);
    for (char c : t)
      require(std::isdigit(static_cast<unsigned char>(c)), ErrorCode::format,
              path + ": expected integer, found '" + t + "'");
    return static_cast<uint32_t>(std::stoul(t));
  }
};

}  // namespace

DepthPanorama read_depth_pgm(const std::string& path) {
  std::string bytes = read_file(path);
  PnmCursor cur{bytes};
  std::string magic = cur.token(path);
  require(magic == "P5", ErrorCode::format,
          path + ": expected P5, found " + magic);
  uint32_t width = cur.number(path);
  uint32_t height = cur.number(path);
  uint32_t maxval = cur.number(path);
  require(maxval == 65535, ErrorCode::format,
          path + ": depth PGM must have maxval 65535, found " +
              std::to_string(maxval));
  std::size_t start = cur.pos + 1;  // single whitespace after maxval
  std::size_t need = static_cast<std::size_t>(width) * height * 2;
  require(bytes.size() >= start + need, ErrorCode::format,
          path + ": truncated sample data");
  DepthPanorama depth(height, width);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + start;
  for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i) {
    uint16_t mm = static_cast<uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
    depth.meters[i] =
        mm == 0 ? DepthPanorama::kNoDepth : static_cast<float>(mm) / 1000.0f;
  }
  return depth;
}

void write_depth_pgm(const DepthPanorama& depth, const std::string& path) {
  std::string out = "P5\n" + std::to_string(depth.width) + " " +
                    std::to_string(depth.height) + "\n65535\n";
  out.reserve(out.size() + depth.meters.size() * 2);
  for (float m : depth.meters) {
    uint16_t mm = 0;
    if (m > 0.0f) {
      double v = std::floor(static_cast<double>(m) * 1000.0 + 0.5);
      require(v <= 65535.0, ErrorCode::invalid_argument,
              "write_depth_pgm: depth exceeds 65.535 m");
      mm = static_cast<uint16_t>(v);
    }
    out.push_back(static_cast<char>(mm >> 8));  // big-endian per Netpbm
    out.push_back(static_cast<char>(mm & 0xff));
  }
  write_file(path, out);
}

PanoramaImage read_ppm(const std::string& path) {
  std::string bytes = read_file(path);
  PnmCursor cur{bytes};
  std::string magic = cur.token(path);
  require(magic == "P6", ErrorCode::format,
          path + ": expected P6, found " + magic);
  uint32_t width = cur.number(path);
  uint32_t height = cur.number(path);
  uint32_t maxval = cur.number(path);
  require(maxval == 255, ErrorCode::format,
          path + ": only 8-bit PPM supported");
  std::size_t start = cur.pos + 1;
  std::size_t need = static_cast<std::size_t>(width) * height * 3;
  require(bytes.size() >= start + need, ErrorCode::format,
          path + ": truncated sample data");
  PanoramaImage img(height, width);
  std::memcpy(img.rgb.data(), bytes.data() + start, need);
  return img;
}

void write_ppm(const PanoramaImage& image, const std::string& path) {
  std::string out = "P6\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()),
             image.rgb.size());
  write_file(path, out);
}

LabeledPointCloud read_ply_ascii(const std::string& path) {
  std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::string line;
  require(std::getline(in, line) && line.substr(0, 3) == "ply",
          ErrorCode::format, path + ": missing ply magic");
  std::size_t count = 0;
  bool have_count = false, ascii = false, in_vertex = false;
  bool has_label = false;
  std::vector<std::string> props;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = fmt == "ascii";
    } else if (word == "comment") {
      continue;
    } else if (word == "element") {
      std::string name;
      std::size_t n = 0;
      ls >> name >> n;
      in_vertex = name == "vertex";
      if (in_vertex) {
        count = n;
        have_count = true;
      }
    } else if (word == "property" && in_vertex) {
      std::string type, name;
      ls >> type >> name;
      props.push_back(name);
      if (name == "label") has_label = true;
    } else if (word == "end_header") {
      break;
    }
  }
  require(ascii, ErrorCode::format, path + ": only ascii PLY supported");
  require(have_count, ErrorCode::format, path + ": missing vertex element");
  require(props.size() >= 3 && props[0] == "x" && props[1] == "y" &&
              props[2] == "z",
          ErrorCode::format, path + ": expected x y z properties");

  LabeledPointCloud cloud;
  cloud.points.reserve(count);
  if (has_label) cloud.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 p;
    if (!(in >> p.x >> p.y >> p.z)) {
      fail(ErrorCode::format,
           path + ": vertex count mismatch, header promised " +
               std::to_string(count) + ", body holds " + std::to_string(i));
    }
    if (has_label) {
      unsigned label = 0;
      require(static_cast<bool>(in >> label), ErrorCode::format,
              path + ": missing label on vertex " + std::to_string(i));
      require(label <= 255, ErrorCode::format, path + ": label out of range");
      cloud.labels.push_back(static_cast<uint8_t>(label));
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_ply_ascii(const LabeledPointCloud& cloud, const std::string& path) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " +
                    std::to_string(cloud.size()) +
                    "\nproperty float x\nproperty float y\nproperty float z\n";
  if (cloud.has_labels()) out += "property uchar label\n";
  out += "end_header\n";
  char buf[128];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (cloud.has_labels()) {
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %u\n", p.x, p.y, p.z,
                    static_cast<unsigned>(cloud.labels[i]));
    } else {
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
    }
    out += buf;
  }
  write_file(path, out);
}

}  // namespace panobev
