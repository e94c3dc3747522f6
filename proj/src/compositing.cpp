#include "tempowarp/compositing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace tempowarp {

std::size_t MaskImage::count() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{1}));
}

void PyramidConfig::validate(int width, int height) const {
  require(levels >= 1 && levels < 16, ErrorKind::InvalidInput, "pyramid levels must lie in 1..15");
  require(std::min(width, height) >= (1 << levels), ErrorKind::InvalidInput,
          "image is too small for " + std::to_string(levels) + " pyramid levels");
}

std::vector<Point2> mouth_polygon(const LandmarkFrame& inferred) {
  require(inferred.is_mouth_convention(), ErrorKind::ConventionViolation,
          "mouth mask needs the 39-point convention");
  std::size_t top = 0;
  for (std::size_t i = 1; i < inferred.size(); ++i) {
    if (inferred[i].y < inferred[top].y) top = i;
  }
  std::vector<Point2> poly;
  poly.push_back(inferred[top]);
  for (std::size_t i = mouth::kJawBegin; i < mouth::kJawBegin + mouth::kJawCount; ++i) {
    if (i != top) poly.push_back(inferred[i]);
  }
  return poly;
}

MaskImage fill_polygon(const std::vector<Point2>& polygon, int width, int height) {
  require(width > 0 && height > 0, ErrorKind::InvalidInput, "mask needs a non-empty grid");
  MaskImage mask(width, height);
  const std::size_t n = polygon.size();
  std::vector<double> crossings;
  for (int y = 0; y < height; ++y) {
    const double py = y;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      Point2 a = polygon[i];
      Point2 b = polygon[(i + 1) % n];
      if ((a.y > py) == (b.y > py)) continue;
      // Interpolate from the upper endpoint so a scanline through a vertex hits it exactly.
      if (b.y < a.y) std::swap(a, b);
      crossings.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int begin = std::max(0, static_cast<int>(std::ceil(crossings[k])));
      const int end = std::min(width, static_cast<int>(std::ceil(crossings[k + 1])));
      for (int x = begin; x < end; ++x) mask.at(x, y) = 1;
    }
  }
  return mask;
}

MaskImage mouth_mask(const LandmarkFrame& inferred, int width, int height) {
  const auto poly = mouth_polygon(inferred);
  double twice_area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    twice_area += a.x * b.y - b.x * a.y;
  }
  double extent = 1.0;
  for (const auto& p : poly) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  require(std::abs(twice_area) > 1e-9 * extent * extent, ErrorKind::DegenerateMask,
          "mouth polygon has zero area");
  return fill_polygon(poly, width, height);
}

namespace {

using Plane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;  // rows = y

constexpr double kTaps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

Plane blur(const Plane& in) {
  const auto h = in.rows();
  const auto w = in.cols();
  Plane tmp(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * in(y, std::clamp<Eigen::Index>(x + k, 0, w - 1));
      tmp(y, x) = acc;
    }
  }
  Plane out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * tmp(std::clamp<Eigen::Index>(y + k, 0, h - 1), x);
      out(y, x) = acc;
    }
  }
  return out;
}

Plane down(const Plane& in) {
  const Plane smooth = blur(in);
  Plane out((in.rows() + 1) / 2, (in.cols() + 1) / 2);
  for (Eigen::Index y = 0; y < out.rows(); ++y) {
    for (Eigen::Index x = 0; x < out.cols(); ++x) out(y, x) = smooth(2 * y, 2 * x);
  }
  return out;
}

/// Expand to rows x cols: zero insertion followed by the binomial kernel scaled by 2 per
/// axis, with coarse indices clamped at the border.
Plane up(const Plane& in, Eigen::Index rows, Eigen::Index cols) {
  const auto expand_axis = [](Eigen::Index i, Eigen::Index coarse, auto&& fn) {
    double acc = 0.0;
    for (Eigen::Index j = (i - 2 + 1) / 2 - 1; j <= (i + 2) / 2 + 1; ++j) {
      const Eigen::Index d = i - 2 * j;
      if (d < -2 || d > 2) continue;
      acc += 2.0 * kTaps[d + 2] * fn(std::clamp<Eigen::Index>(j, 0, coarse - 1));
    }
    return acc;
  };
  Plane tmp(in.rows(), cols);
  for (Eigen::Index y = 0; y < in.rows(); ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      tmp(y, x) = expand_axis(x, in.cols(), [&](Eigen::Index j) { return in(y, j); });
    }
  }
  Plane out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      out(y, x) = expand_axis(y, in.rows(), [&](Eigen::Index j) { return tmp(j, x); });
    }
  }
  return out;
}

std::vector<Plane> laplacian_pyramid(const Plane& base, int levels) {
  std::vector<Plane> gauss{base};
  for (int k = 1; k < levels; ++k) gauss.push_back(down(gauss.back()));
  std::vector<Plane> lap(levels);
  for (int k = 0; k + 1 < levels; ++k) {
    lap[k] = gauss[k] - up(gauss[k + 1], gauss[k].rows(), gauss[k].cols());
  }
  lap[levels - 1] = gauss[levels - 1];
  return lap;
}

Plane channel_plane(const Image& img, int c) {
  Plane p(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) p(y, x) = img.at(x, y, c);
  }
  return p;
}

}  // namespace

Image laplacian_blend(const Image& fg, const Image& bg, const MaskImage& mask,
                      const PyramidConfig& config) {
  require(fg.same_shape(bg), ErrorKind::InvalidInput, "foreground and background differ in shape");
  require(mask.width == fg.width() && mask.height == fg.height(), ErrorKind::InvalidInput,
          "mask size differs from the images");
  config.validate(fg.width(), fg.height());
  const int levels = config.levels;

  Plane m(mask.height, mask.width);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) m(y, x) = mask.at(x, y) ? 1.0 : 0.0;
  }
  std::vector<Plane> mask_pyr{blur(m)};
  for (int k = 1; k < levels; ++k) mask_pyr.push_back(down(mask_pyr.back()));

  Image out(fg.width(), fg.height(), fg.channels());
  for (int c = 0; c < fg.channels(); ++c) {
    const auto lf = laplacian_pyramid(channel_plane(fg, c), levels);
    const auto lb = laplacian_pyramid(channel_plane(bg, c), levels);
    Plane acc = mask_pyr[levels - 1] * lf[levels - 1] + (1.0 - mask_pyr[levels - 1]) * lb[levels - 1];
    for (int k = levels - 2; k >= 0; --k) {
      const Plane band = mask_pyr[k] * lf[k] + (1.0 - mask_pyr[k]) * lb[k];
      acc = band + up(acc, band.rows(), band.cols());
    }
    for (int y = 0; y < fg.height(); ++y) {
      for (int x = 0; x < fg.width(); ++x) {
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(acc(y, x)), 0L, 255L));
      }
    }
  }
  return out;
}

Image retarget(const Image& face, const Image& mouth_crop, Point2 center) {
  require(mouth_crop.width() <= face.width() && mouth_crop.height() <= face.height(),
          ErrorKind::InvalidInput, "mouth crop is larger than the face frame");
  require(mouth_crop.channels() == face.channels(), ErrorKind::InvalidInput,
          "mouth crop and face differ in channel count");
  require(is_finite(center), ErrorKind::InvalidInput, "mouth center is not finite");
  Image out = face;
  const int x0 = static_cast<int>(std::lround(center.x)) - mouth_crop.width() / 2;
  const int y0 = static_cast<int>(std::lround(center.y)) - mouth_crop.height() / 2;
  for (int y = 0; y < mouth_crop.height(); ++y) {
    const int fy = y0 + y;
    if (fy < 0 || fy >= face.height()) continue;
    for (int x = 0; x < mouth_crop.width(); ++x) {
      const int fx = x0 + x;
      if (fx < 0 || fx >= face.width()) continue;
      for (int c = 0; c < face.channels(); ++c) out.at(fx, fy, c) = mouth_crop.at(x, y, c);
    }
  }
  return out;
}

}  // namespace tempowarp
