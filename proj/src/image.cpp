#include "smmvs/image.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace smmvs {

namespace {

void check_range(const std::vector<double>& pixels) {
  for (double p : pixels) {
    if (!(p >= 0.0 && p <= 255.0)) {
      throw std::invalid_argument("Image: intensity outside [0, 255]");
    }
  }
}

// Skips whitespace and '#' comment lines in a PGM header.
int next_header_int(std::istream& in) {
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  if (!in) {
    throw std::runtime_error("PGM: malformed header");
  }
  return value;
}

}  // namespace

Image::Image(int width, int height, double fill)
    : width_(width), height_(height),
      pixels_(static_cast<size_t>(width) * height, fill) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("Image: dimensions must be positive");
  }
  check_range(pixels_);
}

Image::Image(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("Image: dimensions must be positive");
  }
  if (pixels_.size() != static_cast<size_t>(width) * height) {
    throw std::invalid_argument("Image: pixel count does not match dimensions");
  }
  check_range(pixels_);
}

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("PGM: cannot open " + path);
  }
  std::string magic;
  in >> magic;
  if (magic != "P5") {
    throw std::runtime_error("PGM: expected binary P5 format in " + path);
  }
  const int width = next_header_int(in);
  const int height = next_header_int(in);
  const int maxval = next_header_int(in);
  if (maxval <= 0 || maxval > 255) {
    throw std::runtime_error("PGM: only 8-bit images are supported");
  }
  in.get();  // single whitespace after maxval
  std::vector<uint8_t> raw(static_cast<size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), raw.size());
  if (!in) {
    throw std::runtime_error("PGM: truncated pixel data in " + path);
  }
  std::vector<double> pixels(raw.begin(), raw.end());
  return Image(width, height, std::move(pixels));
}

void write_pgm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("PGM: cannot write " + path);
  }
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<uint8_t> raw(img.pixels().size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const double v = std::round(img.pixels()[i]);
    raw[i] = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
}

void write_pgm_normalized(int width, int height,
                          const std::vector<double>& values,
                          const std::string& path) {
  if (values.size() != static_cast<size_t>(width) * height) {
    throw std::invalid_argument("write_pgm_normalized: size mismatch");
  }
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  std::vector<double> scaled(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    scaled[i] = span > 0.0 ? (values[i] - lo) / span * 255.0 : 0.0;
  }
  write_pgm(Image(width, height, std::move(scaled)), path);
}

void write_csv_grid(int width, int height, const std::vector<double>& values,
                    const std::string& path) {
  if (values.size() != static_cast<size_t>(width) * height) {
    throw std::invalid_argument("write_csv_grid: size mismatch");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("CSV: cannot write " + path);
  }
  char buf[32];
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      std::snprintf(buf, sizeof(buf), "%.12g", values[r * width + c]);
      out << buf << (c + 1 == width ? "\n" : ",");
    }
  }
}

}  // namespace smmvs
