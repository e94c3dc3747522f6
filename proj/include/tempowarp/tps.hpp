#pragma once

#include <vector>

#include <Eigen/Core>

#include "tempowarp/core_types.hpp"

namespace tempowarp {

/// Norm used for the radial distance inside U. Euclidean is the classical
/// biharmonic form; L1 is offered as an alternative.
enum class DistanceMode { Euclidean, L1 };

/// U(r) = r^2 ln r, with U(0) = 0.
double kernel_u(double r);

double basis_distance(Point2 a, Point2 b, DistanceMode mode);

/// U(dist(center, q_k)) for every sample q_k = (xs[k], ys[k]).
Eigen::ArrayXd kernel_u_samples(Point2 center, const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys,
                                DistanceMode mode);

/// Coefficients of one frame's 2-D thin-plate spline. Column 0 drives the
/// output x coordinate and column 1 the output y coordinate.
struct TpsFrameParams {
  Eigen::Vector2d a1 = Eigen::Vector2d::Zero();
  Eigen::Vector2d ax = Eigen::Vector2d(1.0, 0.0);
  Eigen::Vector2d ay = Eigen::Vector2d(0.0, 1.0);
  Eigen::MatrixX2d w;
  std::vector<Point2> centers;
  DistanceMode distance = DistanceMode::Euclidean;

  std::size_t point_count() const { return centers.size(); }

  /// Identity map anchored at the given centers (all radial weights zero).
  static TpsFrameParams identity(std::vector<Point2> centers,
                                 DistanceMode distance = DistanceMode::Euclidean);
};

struct TpsSequenceParams {
  std::vector<TpsFrameParams> frames;

  std::size_t frame_count() const { return frames.size(); }
  std::size_t point_count() const { return frames.empty() ? 0 : frames.front().point_count(); }
  void validate() const;
};

/// Height x width grid of mapped coordinates; cell (x, y) is the image of pixel (x, y).
struct DenseField {
  int width = 0;
  int height = 0;
  Eigen::ArrayXXd fx;  // rows = y, cols = x
  Eigen::ArrayXXd fy;
};

struct TpsSolveOptions {
  double ridge = 0.0;
  DistanceMode distance = DistanceMode::Euclidean;
};

/// Interpolating thin-plate spline with centers at the source landmarks, so that
/// eval_point(result, src[i]) == dst[i] when ridge is zero.
TpsFrameParams solve_frame(const LandmarkFrame& src, const LandmarkFrame& dst,
                           const TpsSolveOptions& options = {});

Point2 eval_point(const TpsFrameParams& params, Point2 q);

DenseField warp_field(const TpsFrameParams& params, int width, int height);

}  // namespace tempowarp
