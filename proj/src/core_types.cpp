#include "tempowarp/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace tempowarp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::ConventionViolation: return "convention violation";
    case ErrorKind::DegenerateConfiguration: return "degenerate configuration";
    case ErrorKind::SingularSystem: return "singular system";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::EmptyBank: return "empty bank";
    case ErrorKind::DegenerateMask: return "degenerate mask";
    case ErrorKind::UndefinedMetric: return "undefined metric";
    case ErrorKind::NumericalFailure: return "numerical failure";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

LandmarkFrame::LandmarkFrame(std::vector<Point2> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(is_finite(points_[i]), ErrorKind::InvalidInput,
            "landmark " + std::to_string(i) + " is not finite");
  }
}

LandmarkFrame LandmarkFrame::translated(Point2 offset) const {
  std::vector<Point2> moved(points_);
  for (auto& p : moved) p = p + offset;
  return LandmarkFrame(std::move(moved));
}

LandmarkWindow::LandmarkWindow(std::vector<LandmarkFrame> frames, double fps)
    : frames_(std::move(frames)), fps_(fps) {
  require(!frames_.empty(), ErrorKind::InvalidInput, "landmark window needs at least one frame");
  require(std::isfinite(fps_) && fps_ > 0.0, ErrorKind::InvalidInput, "fps must be positive");
  const auto p = frames_.front().size();
  for (std::size_t t = 1; t < frames_.size(); ++t) {
    require(frames_[t].size() == p, ErrorKind::InvalidInput,
            "frame " + std::to_string(t) + " has " + std::to_string(frames_[t].size()) +
                " points, expected " + std::to_string(p));
  }
}

LandmarkWindow LandmarkWindow::slice(std::size_t begin, std::size_t count) const {
  require(begin + count <= frames_.size() && count > 0, ErrorKind::InvalidInput,
          "window slice out of range");
  return LandmarkWindow({frames_.begin() + begin, frames_.begin() + begin + count}, fps_);
}

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  require(width >= 0 && height >= 0, ErrorKind::InvalidInput, "negative image size");
  require(channels == 1 || channels == 3, ErrorKind::InvalidInput, "images carry 1 or 3 channels");
  pixels_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  require(width >= 0 && height >= 0, ErrorKind::InvalidInput, "negative image size");
  require(channels == 1 || channels == 3, ErrorKind::InvalidInput, "images carry 1 or 3 channels");
  require(pixels_.size() == static_cast<std::size_t>(width) * height * channels,
          ErrorKind::InvalidInput, "pixel buffer does not match width x height x channels");
}

std::uint8_t Image::clamped(int x, int y, int c) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y, c);
}

void CropSpec::validate() const {
  require(side > 0 && side % 2 == 0, ErrorKind::InvalidInput, "crop side must be positive and even");
}

Point2 AffineTransform::apply(Point2 p) const {
  const Eigen::Vector2d q = linear * Eigen::Vector2d(p.x, p.y) + translation;
  return {q.x(), q.y()};
}

LandmarkFrame AffineTransform::apply(const LandmarkFrame& frame) const {
  std::vector<Point2> out;
  out.reserve(frame.size());
  for (const auto& p : frame.points()) out.push_back(apply(p));
  return LandmarkFrame(std::move(out));
}

Point2 mouth_center(const LandmarkFrame& frame) {
  require(frame.is_mouth_convention(), ErrorKind::ConventionViolation,
          "mouth frames carry 39 points, got " + std::to_string(frame.size()));
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < mouth::kLipCount; ++i) {
    sx += frame[i].x;
    sy += frame[i].y;
  }
  return {sx / mouth::kLipCount, sy / mouth::kLipCount};
}

std::array<int, 2> crop_origin(Point2 center, const CropSpec& spec) {
  return {static_cast<int>(std::lround(center.x)) - spec.side / 2,
          static_cast<int>(std::lround(center.y)) - spec.side / 2};
}

Image crop_at(const Image& image, Point2 center, const CropSpec& spec) {
  spec.validate();
  require(!image.empty(), ErrorKind::InvalidInput, "cannot crop an empty image");
  require(is_finite(center), ErrorKind::InvalidInput, "crop center is not finite");
  const auto [x0, y0] = crop_origin(center, spec);
  Image out(spec.side, spec.side, image.channels());
  for (int y = 0; y < spec.side; ++y) {
    for (int x = 0; x < spec.side; ++x) {
      for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = image.clamped(x0 + x, y0 + y, c);
    }
  }
  return out;
}

Image crop_mouth(const Image& image, const LandmarkFrame& frame, const CropSpec& spec) {
  return crop_at(image, mouth_center(frame), spec);
}

AffineTransform align_face(const LandmarkFrame& frame, const LandmarkFrame& reference) {
  require(frame.size() == 5 && reference.size() == 5, ErrorKind::InvalidInput,
          "face alignment takes exactly 5 points per frame");
  Eigen::Matrix<double, 5, 3> design;
  Eigen::Matrix<double, 5, 2> target;
  double scale = 0.0;
  for (int i = 0; i < 5; ++i) {
    design.row(i) << frame[i].x, frame[i].y, 1.0;
    target.row(i) << reference[i].x, reference[i].y;
    scale = std::max({scale, std::abs(frame[i].x), std::abs(frame[i].y)});
  }
  // Rank test on the centred source points: collinear or coincident sets leave
  // the 2x2 scatter rank-deficient.
  Eigen::Matrix<double, 5, 2> centred = design.leftCols<2>();
  centred.rowwise() -= centred.colwise().mean();
  const Eigen::JacobiSVD<Eigen::Matrix<double, 5, 2>> svd(centred);
  const double tol = 1e-9 * std::max(1.0, scale);
  require(svd.singularValues()(1) > tol, ErrorKind::DegenerateConfiguration,
          "face points are collinear or coincident");

  const Eigen::Matrix<double, 3, 2> solution = design.colPivHouseholderQr().solve(target);
  AffineTransform out;
  out.linear = solution.topRows<2>().transpose();
  out.translation = solution.row(2).transpose();
  return out;
}

}  // namespace tempowarp
