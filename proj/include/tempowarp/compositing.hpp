#pragma once

#include <cstdint>
#include <vector>

#include "tempowarp/core_types.hpp"

namespace tempowarp {

/// Binary mask, one byte per pixel holding 0 or 1.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  MaskImage() = default;
  MaskImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count() const;

  friend bool operator==(const MaskImage&, const MaskImage&) = default;
};

struct PyramidConfig {
  int levels = 4;

  void validate(int width, int height) const;
};

/// Closed polygon through the uppermost landmark and the jawline.
std::vector<Point2> mouth_polygon(const LandmarkFrame& inferred);

/// Even-odd scanline fill; pixel (x, y) is tested at its centre (x, y).
MaskImage fill_polygon(const std::vector<Point2>& polygon, int width, int height);

MaskImage mouth_mask(const LandmarkFrame& inferred, int width, int height);

/// Multi-band blend: fg where the mask is 1, bg where it is 0.
Image laplacian_blend(const Image& fg, const Image& bg, const MaskImage& mask,
                      const PyramidConfig& config = {});

/// Copy of `face` with `mouth_crop` pasted so that the crop's centre pixel lands
/// on round(center). Pixels falling outside the face are dropped.
Image retarget(const Image& face, const Image& mouth_crop, Point2 center);

}  // namespace tempowarp
