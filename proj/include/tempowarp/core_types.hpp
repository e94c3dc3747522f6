#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tempowarp/error.hpp"

namespace tempowarp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

bool is_finite(Point2 p);

/// Index layout of the 39-point mouth-area convention.
///
///  0..11  outer lip contour, starting at the left corner and running over the
///         upper lip to the right corner, then back along the lower lip
/// 12..19  inner lip: 12 left corner, 13-15 upper, 16 right corner, 17-19 lower
///         (17 sits under 15, 18 under 14, 19 under 13)
/// 20..38  jawline, left to right
namespace mouth {
inline constexpr std::size_t kPointCount = 39;
inline constexpr std::size_t kLipCount = 20;
inline constexpr std::size_t kJawBegin = 20;
inline constexpr std::size_t kJawCount = 19;
inline constexpr std::array<std::array<std::size_t, 2>, 3> kInnerLipPairs{{{13, 19}, {14, 18}, {15, 17}}};
}  // namespace mouth

/// One frame of landmarks. Coordinates are finite pixel positions, origin top-left, y down.
class LandmarkFrame {
 public:
  LandmarkFrame() = default;
  explicit LandmarkFrame(std::vector<Point2> points);

  std::size_t size() const { return points_.size(); }
  const Point2& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point2> points() const { return points_; }

  LandmarkFrame translated(Point2 offset) const;
  bool is_mouth_convention() const { return points_.size() == mouth::kPointCount; }

  friend bool operator==(const LandmarkFrame&, const LandmarkFrame&) = default;

 private:
  std::vector<Point2> points_;
};

/// T frames of landmarks sharing the same point count.
class LandmarkWindow {
 public:
  LandmarkWindow() = default;
  explicit LandmarkWindow(std::vector<LandmarkFrame> frames, double fps = 30.0);

  std::size_t frame_count() const { return frames_.size(); }
  std::size_t point_count() const { return frames_.empty() ? 0 : frames_.front().size(); }
  double fps() const { return fps_; }
  const LandmarkFrame& operator[](std::size_t t) const { return frames_[t]; }
  std::span<const LandmarkFrame> frames() const { return frames_; }

  /// Frames [begin, begin + count).
  LandmarkWindow slice(std::size_t begin, std::size_t count) const;

  friend bool operator==(const LandmarkWindow&, const LandmarkWindow&) = default;

 private:
  std::vector<LandmarkFrame> frames_;
  double fps_ = 30.0;
};

/// A whole clip's landmarks; same representation as a window.
using LandmarkSequence = LandmarkWindow;

/// Row-major 8-bit image with 1 or 3 interleaved channels.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0);
  Image(int width, int height, int channels, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  /// Border-clamped read.
  std::uint8_t clamped(int x, int y, int c = 0) const;

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> pixels_;
};

using ImageWindow = std::vector<Image>;
using ImageSequence = std::vector<Image>;

/// Square mouth crop centred on the mean of the 20 lip landmarks.
struct CropSpec {
  int side = 148;

  void validate() const;
};

/// x' = A x + b.
struct AffineTransform {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Point2 apply(Point2 p) const;
  LandmarkFrame apply(const LandmarkFrame& frame) const;
};

/// Mean of the 20 lip landmarks (indices 0..19) of a 39-point mouth frame.
Point2 mouth_center(const LandmarkFrame& frame);

/// Top-left pixel of the crop window centred on `center`.
std::array<int, 2> crop_origin(Point2 center, const CropSpec& spec);

/// side x side sub-image around the mouth center; outside pixels replicate the border.
Image crop_mouth(const Image& image, const LandmarkFrame& frame, const CropSpec& spec);
Image crop_at(const Image& image, Point2 center, const CropSpec& spec);

/// Least-squares affine map taking the 5 face points of `frame` onto `reference`.
AffineTransform align_face(const LandmarkFrame& frame, const LandmarkFrame& reference);

}  // namespace tempowarp
