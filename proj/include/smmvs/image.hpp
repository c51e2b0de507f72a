#pragma once

#include <string>
#include <vector>

namespace smmvs {

/// Grayscale raster, row-major, intensities in [0, 255].
/// Values are doubles so resampled renders stay continuous in pose.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  bool empty() const { return size() == 0; }

  double& at(int row, int col) { return pixels_[row * width_ + col]; }
  double at(int row, int col) const { return pixels_[row * width_ + col]; }

  std::vector<double>& pixels() { return pixels_; }
  const std::vector<double>& pixels() const { return pixels_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

/// Reads a binary (P5) 8-bit PGM.
Image read_pgm(const std::string& path);

/// Writes a binary (P5) PGM, rounding and clamping to [0, 255].
void write_pgm(const Image& img, const std::string& path);

/// Writes an arbitrary grid as PGM after min-max normalization to [0, 255].
void write_pgm_normalized(int width, int height,
                          const std::vector<double>& values,
                          const std::string& path);

/// Writes a grid as CSV, one image row per line.
void write_csv_grid(int width, int height, const std::vector<double>& values,
                    const std::string& path);

}  // namespace smmvs
