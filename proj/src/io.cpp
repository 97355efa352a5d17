// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mvopt {

namespace {

// The harness targets little-endian hosts; PFM scale -1 declares it.
static_assert(std::endian::native == std::endian::little, "little-endian host required");

void write_pfm_raster(const std::string& path, const std::vector<float>& data, int w, int h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "Pf\n" << w << " " << h << "\n-1.0\n";
  // PFM stores rows bottom-to-top.
  for (int v = h - 1; v >= 0; --v)
    out.write(reinterpret_cast<const char*>(&data[static_cast<size_t>(v) * w]),
              static_cast<std::streamsize>(sizeof(float)) * w);
  if (!out) throw IoError("short write: " + path);
}

std::vector<float> read_pfm_raster(const std::string& path, int& w, int& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string magic;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (magic != "Pf" || w <= 0 || h <= 0) throw IoError("not a grayscale PFM: " + path);
  in.get();  // single whitespace after the header
  std::vector<float> data(static_cast<size_t>(w) * h);
  for (int v = h - 1; v >= 0; --v)
    in.read(reinterpret_cast<char*>(&data[static_cast<size_t>(v) * w]),
            static_cast<std::streamsize>(sizeof(float)) * w);
  if (!in) throw IoError("short read: " + path);
  if (scale > 0.0)  // big-endian file
    for (float& f : data) {
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      bits = __builtin_bswap32(bits);
      std::memcpy(&f, &bits, 4);
    }
  return data;
}

struct PngFile {
  FILE* fp = nullptr;
  explicit PngFile(const std::string& path, const char* mode) : fp(std::fopen(path.c_str(), mode)) {
    if (!fp) throw IoError("cannot open: " + path);
  }
  ~PngFile() {
    if (fp) std::fclose(fp);
  }
};

void write_png(const std::string& path, const uint8_t* rows_base, int width, int height,
               int color_type, int bit_depth, size_t row_bytes) {
  PngFile file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng write failure: " + path);
  }
  png_init_io(png, file.fp);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // in-memory little endian -> network order
  for (int v = 0; v < height; ++v)
    png_write_row(png, const_cast<png_bytep>(rows_base + static_cast<size_t>(v) * row_bytes));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::vector<uint8_t> read_png(const std::string& path, int& width, int& height, int expect_color,
                              int expect_depth) {
  PngFile file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng read failure: " + path);
  }
  png_init_io(png, file.fp);
  png_read_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != expect_color || depth != expect_depth) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unexpected PNG layout: " + path);
  }
  if (depth == 16) png_set_swap(png);
  const size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<uint8_t> data(row_bytes * height);
  for (int v = 0; v < height; ++v) png_read_row(png, data.data() + static_cast<size_t>(v) * row_bytes, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return data;
}

}  // namespace

void write_pfm(const std::string& path, const DepthMap& map) {
  // Invalid pixels already carry the 0 sentinel in values().
  write_pfm_raster(path, map.values(), map.width(), map.height());
}

DepthMap read_pfm(const std::string& path) {
  int w = 0, h = 0;
  const std::vector<float> data = read_pfm_raster(path, w, h);
  DepthMap map(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const float d = data[static_cast<size_t>(v) * w + u];
      if (d > 0.0f && std::isfinite(d)) map.set(u, v, d);
    }
  return map;
}

void write_pfm(const std::string& path, const GrayImage& image) {
  write_pfm_raster(path, image.data(), image.width(), image.height());
}

GrayImage read_pfm_gray(const std::string& path) {
  int w = 0, h = 0;
  const std::vector<float> data = read_pfm_raster(path, w, h);
  GrayImage image(w, h);
  image.data() = data;
  return image;
}

void write_png16_depth(const std::string& path, const DepthMap& map) {
  std::vector<uint16_t> mm(static_cast<size_t>(map.width()) * map.height(), 0);
  for (int v = 0; v < map.height(); ++v)
    for (int u = 0; u < map.width(); ++u)
      if (map.valid(u, v)) {
        const double value = std::round(map.value(u, v) * 1000.0);
        mm[map.index(u, v)] = static_cast<uint16_t>(std::min(65535.0, std::max(1.0, value)));
      }
  write_png(path, reinterpret_cast<const uint8_t*>(mm.data()), map.width(), map.height(),
            PNG_COLOR_TYPE_GRAY, 16, static_cast<size_t>(map.width()) * 2);

  nlohmann::ordered_json sidecar;
  sidecar["unit"] = "millimeter";
  sidecar["scale_to_meters"] = 0.001;
  sidecar["invalid_value"] = 0;
  std::ofstream side(path + ".json");
  if (!side) throw IoError("cannot write sidecar: " + path + ".json");
  side << sidecar.dump(2) << "\n";
}

DepthMap read_png16_depth(const std::string& path) {
  double scale = 0.001;
  {
    std::ifstream side(path + ".json");
    if (side) {
      nlohmann::json sidecar = nlohmann::json::parse(side);
      scale = sidecar.value("scale_to_meters", 0.001);
    }
  }
  int w = 0, h = 0;
  const std::vector<uint8_t> raw = read_png(path, w, h, PNG_COLOR_TYPE_GRAY, 16);
  DepthMap map(w, h);
  const uint16_t* mm = reinterpret_cast<const uint16_t*>(raw.data());
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const uint16_t value = mm[static_cast<size_t>(v) * w + u];
      if (value > 0) map.set(u, v, static_cast<float>(value * scale));
    }
  return map;
}

void write_png8_rgb(const std::string& path, const Image& image) {
  std::vector<uint8_t> bytes(static_cast<size_t>(image.width()) * image.height() * 3);
  for (size_t i = 0; i < bytes.size(); ++i) {
    const float v = image.data()[i];
    bytes[i] = static_cast<uint8_t>(std::lround(std::min(1.0f, std::max(0.0f, v)) * 255.0f));
  }
  write_png(path, bytes.data(), image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8,
            static_cast<size_t>(image.width()) * 3);
}

Image read_png8_rgb(const std::string& path) {
  int w = 0, h = 0;
  const std::vector<uint8_t> bytes = read_png(path, w, h, PNG_COLOR_TYPE_RGB, 8);
  Image image(w, h);
  for (size_t i = 0; i < bytes.size(); ++i) image.data()[i] = bytes[i] / 255.0f;
  return image;
}

void write_png8_gray(const std::string& path, const std::vector<uint8_t>& pixels, int width,
                     int height) {
  if (pixels.size() != static_cast<size_t>(width) * height)
    throw InvalidInputError("png8 gray: size mismatch");
  write_png(path, pixels.data(), width, height, PNG_COLOR_TYPE_GRAY, 8,
            static_cast<size_t>(width));
}

std::vector<uint8_t> read_png8_gray(const std::string& path, int& width, int& height) {
  return read_png(path, width, height, PNG_COLOR_TYPE_GRAY, 8);
}

void write_tum_trajectory(const std::string& path,
                          const std::vector<std::pair<int, PoseSE3>>& trajectory) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "# timestamp tx ty tz qx qy qz qw\n";
  out.precision(17);
  for (const auto& [id, pose] : trajectory) {
    const PoseSE3 cam_to_world = pose.inverse();
    const Eigen::Quaterniond q(cam_to_world.rotation());
    const Vec3& t = cam_to_world.translation();
    out << id << " " << t.x() << " " << t.y() << " " << t.z() << " " << q.x() << " " << q.y()
        << " " << q.z() << " " << q.w() << "\n";
  }
}

std::vector<std::pair<int, PoseSE3>> read_tum_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::pair<int, PoseSE3>> trajectory;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double ts, tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> ts >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
      throw IoError("malformed TUM line in " + path + ": " + line);
    const PoseSE3 cam_to_world =
        PoseSE3::from_quaternion(Eigen::Quaterniond(qw, qx, qy, qz), Vec3(tx, ty, tz));
    trajectory.emplace_back(static_cast<int>(std::llround(ts)), cam_to_world.inverse());
  }
  return trajectory;
}

void write_ply(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  const bool with_normals = mesh.normals.size() == mesh.vertices.size() && !mesh.normals.empty();
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (with_normals) out << "property float nx\nproperty float ny\nproperty float nz\n";
  out << "element face " << mesh.triangles.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    float xyz[3] = {static_cast<float>(mesh.vertices[i].x()), static_cast<float>(mesh.vertices[i].y()),
                    static_cast<float>(mesh.vertices[i].z())};
    out.write(reinterpret_cast<const char*>(xyz), 12);
    if (with_normals) {
      float n[3] = {static_cast<float>(mesh.normals[i].x()), static_cast<float>(mesh.normals[i].y()),
                    static_cast<float>(mesh.normals[i].z())};
      out.write(reinterpret_cast<const char*>(n), 12);
    }
  }
  for (const auto& tri : mesh.triangles) {
    const uint8_t count = 3;
    int32_t idx[3] = {tri[0], tri[1], tri[2]};
    out.write(reinterpret_cast<const char*>(&count), 1);
    out.write(reinterpret_cast<const char*>(idx), 12);
  }
  if (!out) throw IoError("short write: " + path);
}

TriangleMesh read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  size_t n_vertices = 0, n_faces = 0;
  bool with_normals = false;
  std::getline(in, line);
  if (line != "ply") throw IoError("not a PLY file: " + path);
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "element") {
      std::string kind;
      size_t count;
      ss >> kind >> count;
      if (kind == "vertex") n_vertices = count;
      if (kind == "face") n_faces = count;
    } else if (word == "property") {
      std::string type, name;
      ss >> type >> name;
      if (name == "nx") with_normals = true;
    }
  }
  TriangleMesh mesh;
  mesh.vertices.resize(n_vertices);
  if (with_normals) mesh.normals.resize(n_vertices);
  for (size_t i = 0; i < n_vertices; ++i) {
    float xyz[3];
    in.read(reinterpret_cast<char*>(xyz), 12);
    mesh.vertices[i] = Vec3(xyz[0], xyz[1], xyz[2]);
    if (with_normals) {
      float n[3];
      in.read(reinterpret_cast<char*>(n), 12);
      mesh.normals[i] = Vec3(n[0], n[1], n[2]);
    }
  }
  mesh.triangles.resize(n_faces);
  for (size_t i = 0; i < n_faces; ++i) {
    uint8_t count;
    in.read(reinterpret_cast<char*>(&count), 1);
    if (count != 3) throw IoError("non-triangle face in " + path);
    int32_t idx[3];
    in.read(reinterpret_cast<char*>(idx), 12);
    mesh.triangles[i] = {idx[0], idx[1], idx[2]};
  }
  if (!in) throw IoError("short read: " + path);
  return mesh;
}

}  // namespace mvopt
