#include "tempowarp/tps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace tempowarp {

double kernel_u(double r) {
  require(r >= 0.0, ErrorKind::Domain, "kernel_u takes a nonnegative radius");
  if (r == 0.0) return 0.0;
  return r * r * std::log(r);
}

double basis_distance(Point2 a, Point2 b, DistanceMode mode) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  if (mode == DistanceMode::L1) return std::abs(dx) + std::abs(dy);
  return std::sqrt(dx * dx + dy * dy);
}

Eigen::ArrayXd kernel_u_samples(Point2 center, const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys,
                                DistanceMode mode) {
  const Eigen::ArrayXd dx = xs - center.x;
  const Eigen::ArrayXd dy = ys - center.y;
  if (mode == DistanceMode::L1) {
    const Eigen::ArrayXd r = dx.abs() + dy.abs();
    return (r > 0.0).select(r.square() * r.log(), 0.0);
  }
  // r^2 ln r written as r^2 ln(r^2) / 2 to skip the square root.
  const Eigen::ArrayXd r2 = dx.square() + dy.square();
  return (r2 > 0.0).select(0.5 * r2 * r2.log(), 0.0);
}

TpsFrameParams TpsFrameParams::identity(std::vector<Point2> centers, DistanceMode distance) {
  TpsFrameParams p;
  p.w = Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(centers.size()), 2);
  p.centers = std::move(centers);
  p.distance = distance;
  return p;
}

void TpsSequenceParams::validate() const {
  require(!frames.empty(), ErrorKind::InvalidInput, "parameter sequence is empty");
  const auto p = frames.front().point_count();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& f = frames[t];
    require(f.point_count() == p && static_cast<std::size_t>(f.w.rows()) == p,
            ErrorKind::InvalidInput, "frame " + std::to_string(t) + " has inconsistent point count");
  }
}

TpsFrameParams solve_frame(const LandmarkFrame& src, const LandmarkFrame& dst,
                           const TpsSolveOptions& options) {
  require(src.size() == dst.size(), ErrorKind::InvalidInput,
          "source and target landmark counts differ");
  require(src.size() >= 3, ErrorKind::InvalidInput, "thin-plate spline needs at least 3 landmarks");
  require(options.ridge >= 0.0 && std::isfinite(options.ridge), ErrorKind::InvalidInput,
          "ridge must be finite and nonnegative");

  const auto n = static_cast<Eigen::Index>(src.size());
  double scale = 1.0;
  for (const auto& p : src.points()) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});

  // Affine span: collinear sources leave the [1 x y] block rank deficient.
  {
    Eigen::MatrixX2d centred(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) centred.row(i) << src[i].x, src[i].y;
    centred.rowwise() -= centred.colwise().mean();
    const Eigen::JacobiSVD<Eigen::MatrixX2d> svd(centred);
    require(svd.singularValues()(1) > 1e-10 * scale, ErrorKind::SingularSystem,
            "source landmarks are collinear");
  }
  if (options.ridge == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        require(basis_distance(src[i], src[j], DistanceMode::Euclidean) > 1e-12 * scale,
                ErrorKind::SingularSystem,
                "source landmarks " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
  Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(n + 3, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      system(i, j) = kernel_u(basis_distance(src[i], src[j], options.distance));
    }
    system(i, i) += options.ridge;
    system(i, n) = 1.0;
    system(i, n + 1) = src[i].x;
    system(i, n + 2) = src[i].y;
    system(n, i) = 1.0;
    system(n + 1, i) = src[i].x;
    system(n + 2, i) = src[i].y;
    rhs.row(i) << dst[i].x, dst[i].y;
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  require(lu.isInvertible(), ErrorKind::SingularSystem, "thin-plate spline system is singular");
  const Eigen::MatrixX2d sol = lu.solve(rhs);
  require(sol.allFinite(), ErrorKind::SingularSystem, "thin-plate spline solve produced non-finite values");

  TpsFrameParams out;
  out.w = sol.topRows(n);
  out.a1 = sol.row(n).transpose();
  out.ax = sol.row(n + 1).transpose();
  out.ay = sol.row(n + 2).transpose();
  out.centers.assign(src.points().begin(), src.points().end());
  out.distance = options.distance;
  return out;
}

Point2 eval_point(const TpsFrameParams& params, Point2 q) {
  double fx = params.a1(0) + params.ax(0) * q.x + params.ay(0) * q.y;
  double fy = params.a1(1) + params.ax(1) * q.x + params.ay(1) * q.y;
  for (std::size_t i = 0; i < params.centers.size(); ++i) {
    const double u = kernel_u(basis_distance(params.centers[i], q, params.distance));
    fx += params.w(static_cast<Eigen::Index>(i), 0) * u;
    fy += params.w(static_cast<Eigen::Index>(i), 1) * u;
  }
  return {fx, fy};
}

DenseField warp_field(const TpsFrameParams& params, int width, int height) {
  require(width >= 1 && height >= 1, ErrorKind::InvalidInput, "warp field needs a non-empty grid");
  DenseField field;
  field.width = width;
  field.height = height;
  // Column-major height x width, so sample k sits at y = k % height, x = k / height.
  const Eigen::Index cells = static_cast<Eigen::Index>(width) * height;
  Eigen::ArrayXd xs(cells), ys(cells);
  for (int x = 0; x < width; ++x) {
    xs.segment(static_cast<Eigen::Index>(x) * height, height).setConstant(x);
    ys.segment(static_cast<Eigen::Index>(x) * height, height) = Eigen::ArrayXd::LinSpaced(height, 0, height - 1);
  }
  Eigen::ArrayXd fx = params.a1(0) + params.ax(0) * xs + params.ay(0) * ys;
  Eigen::ArrayXd fy = params.a1(1) + params.ax(1) * xs + params.ay(1) * ys;
  for (std::size_t i = 0; i < params.centers.size(); ++i) {
    const Eigen::ArrayXd u = kernel_u_samples(params.centers[i], xs, ys, params.distance);
    fx += params.w(static_cast<Eigen::Index>(i), 0) * u;
    fy += params.w(static_cast<Eigen::Index>(i), 1) * u;
  }
  field.fx = Eigen::Map<const Eigen::ArrayXXd>(fx.data(), height, width);
  field.fy = Eigen::Map<const Eigen::ArrayXXd>(fy.data(), height, width);
  return field;
}

}  // namespace tempowarp
