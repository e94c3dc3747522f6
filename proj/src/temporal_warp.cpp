#include "tempowarp/temporal_warp.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace tempowarp {

void OptimizerConfig::validate() const {
  weights.validate();
  require(max_iters >= 0, ErrorKind::InvalidInput, "max_iters must be nonnegative");
  require(huber_eps > 0.0 && grad_tol > 0.0 && initial_step > 0.0 && min_step > 0.0,
          ErrorKind::InvalidInput, "optimizer tolerances and steps must be positive");
  require(backtrack_factor > 0.0 && backtrack_factor < 1.0, ErrorKind::InvalidInput,
          "backtrack_factor must lie strictly inside (0, 1)");
  require(damping > 0.0 && std::isfinite(damping), ErrorKind::InvalidInput, "damping must be positive");
  require(armijo_c > 0.0 && armijo_c < 1.0, ErrorKind::InvalidInput,
          "armijo_c must lie strictly inside (0, 1)");
}

Eigen::VectorXd pack_parameters(const TpsSequenceParams& params) {
  params.validate();
  const auto k = params.point_count() + 3;
  Eigen::VectorXd flat(static_cast<Eigen::Index>(params.frame_count() * 2 * k));
  Eigen::Index at = 0;
  for (const auto& f : params.frames) {
    for (int c = 0; c < 2; ++c) {
      flat(at++) = f.a1(c);
      flat(at++) = f.ax(c);
      flat(at++) = f.ay(c);
      for (Eigen::Index i = 0; i < f.w.rows(); ++i) flat(at++) = f.w(i, c);
    }
  }
  return flat;
}

TpsSequenceParams unpack_parameters(const Eigen::VectorXd& flat, const TpsSequenceParams& like) {
  like.validate();
  const auto k = like.point_count() + 3;
  require(static_cast<std::size_t>(flat.size()) == like.frame_count() * 2 * k,
          ErrorKind::InvalidInput, "flat parameter vector has the wrong length");
  TpsSequenceParams out = like;
  Eigen::Index at = 0;
  for (auto& f : out.frames) {
    for (int c = 0; c < 2; ++c) {
      f.a1(c) = flat(at++);
      f.ax(c) = flat(at++);
      f.ay(c) = flat(at++);
      for (Eigen::Index i = 0; i < f.w.rows(); ++i) f.w(i, c) = flat(at++);
    }
  }
  return out;
}

namespace {

double huber(double r, double eps) {
  const double a = std::abs(r);
  return a <= eps ? 0.5 * r * r / eps : a - 0.5 * eps;
}

double huber_slope(double r, double eps) {
  if (std::abs(r) <= eps) return r / eps;
  return r > 0.0 ? 1.0 : -1.0;
}

double huber_curvature(double r, double eps) { return std::abs(r) <= eps ? 1.0 / eps : 0.0; }

void fill_basis_row(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, const std::vector<Point2>& centers,
                    Point2 q, DistanceMode mode) {
  row(0) = 1.0;
  row(1) = q.x;
  row(2) = q.y;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    row(static_cast<Eigen::Index>(3 + i)) = kernel_u(basis_distance(centers[i], q, mode));
  }
}

}  // namespace

TemporalWarpProblem::TemporalWarpProblem(const LandmarkWindow& src, const LandmarkWindow& dst,
                                         int width, int height, const OptimizerConfig& config)
    : config_(config) {
  config_.validate();
  require(src.frame_count() == dst.frame_count() && src.point_count() == dst.point_count(),
          ErrorKind::InvalidInput, "source and target windows differ in shape");
  require(src.frame_count() >= 3, ErrorKind::InsufficientData,
          "temporal warp needs at least 3 frames, got " + std::to_string(src.frame_count()));
  require(src.point_count() >= 3, ErrorKind::InvalidInput, "temporal warp needs at least 3 landmarks");
  require(width >= 3 && height >= 3, ErrorKind::InvalidInput, "warp grid must be at least 3x3");

  frames_ = src.frame_count();
  points_ = src.point_count();
  coeffs_ = points_ + 3;
  const auto n = dimension();
  const auto kk = static_cast<Eigen::Index>(coeffs_);
  const auto mode = config_.solve.distance;

  centers_.resize(frames_);
  for (std::size_t t = 0; t < frames_; ++t) centers_[t].assign(src[t].points().begin(), src[t].points().end());

  design_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(frames_ * points_), n);
  targets_.resize(static_cast<Eigen::Index>(frames_ * points_), 2);
  for (std::size_t t = 0; t < frames_; ++t) {
    for (std::size_t i = 0; i < points_; ++i) {
      const auto row = static_cast<Eigen::Index>(t * points_ + i);
      fill_basis_row(design_.row(row).segment(static_cast<Eigen::Index>(t) * kk, kk), centers_[t],
                     src[t][i], mode);
      targets_(row, 0) = dst[t][i].x;
      targets_(row, 1) = dst[t][i].y;
    }
  }

  // Dense basis per frame, one row per pixel: row y * width + x holds
  // [1, x, y, U_0 .. U_{P-1}] at (x, y).
  const Eigen::Index cells = static_cast<Eigen::Index>(width) * height;
  Eigen::ArrayXd gx(cells), gy(cells);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      gx(static_cast<Eigen::Index>(y) * width + x) = x;
      gy(static_cast<Eigen::Index>(y) * width + x) = y;
    }
  }
  std::vector<Eigen::MatrixXd> basis(frames_, Eigen::MatrixXd(cells, kk));
  for (std::size_t t = 0; t < frames_; ++t) {
    basis[t].col(0).setOnes();
    basis[t].col(1) = gx.matrix();
    basis[t].col(2) = gy.matrix();
    for (std::size_t i = 0; i < points_; ++i) {
      basis[t].col(static_cast<Eigen::Index>(3 + i)) = kernel_u_samples(centers_[t][i], gx, gy, mode).matrix();
    }
  }

  // Second differences of the radial columns on the interior; the affine columns have none.
  bending_ = Eigen::MatrixXd::Zero(n, n);
  const int iw = width - 2;
  const int ih = height - 2;
  const Eigen::Index interior = static_cast<Eigen::Index>(iw) * ih;
  const double bend_norm = 1.0 / (static_cast<double>(interior) * static_cast<double>(frames_));
  const auto p = static_cast<Eigen::Index>(points_);
  Eigen::MatrixXd dxx(interior, p);
  Eigen::MatrixXd dyy(interior, p);
  Eigen::MatrixXd dxy(interior, p);
  for (std::size_t t = 0; t < frames_; ++t) {
    for (Eigen::Index i = 0; i < p; ++i) {
      // Column-major view with x along rows and y along columns.
      const Eigen::Map<const Eigen::ArrayXXd> g(basis[t].col(3 + i).data(), width, height);
      Eigen::Map<Eigen::ArrayXXd>(dxx.col(i).data(), iw, ih) =
          g.block(2, 1, iw, ih) - 2.0 * g.block(1, 1, iw, ih) + g.block(0, 1, iw, ih);
      Eigen::Map<Eigen::ArrayXXd>(dyy.col(i).data(), iw, ih) =
          g.block(1, 2, iw, ih) - 2.0 * g.block(1, 1, iw, ih) + g.block(1, 0, iw, ih);
      Eigen::Map<Eigen::ArrayXXd>(dxy.col(i).data(), iw, ih) =
          0.25 * (g.block(2, 2, iw, ih) - g.block(2, 0, iw, ih) - g.block(0, 2, iw, ih) + g.block(0, 0, iw, ih));
    }
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(p, p);
    block.selfadjointView<Eigen::Lower>().rankUpdate(dxx.transpose(), bend_norm);
    block.selfadjointView<Eigen::Lower>().rankUpdate(dxy.transpose(), 2.0 * bend_norm);
    block.selfadjointView<Eigen::Lower>().rankUpdate(dyy.transpose(), bend_norm);
    const auto at = static_cast<Eigen::Index>(t) * kk + 3;
    bending_.block(at, at, p, p) = block.selfadjointView<Eigen::Lower>();
  }

  temporal_ = Eigen::MatrixXd::Zero(n, n);
  const double temp_norm =
      1.0 / (static_cast<double>(cells) * static_cast<double>(frames_ - 2));
  const double stencil[3] = {1.0, -2.0, 1.0};
  for (std::size_t a = 0; a < frames_; ++a) {
    for (std::size_t b = a; b < frames_ && b <= a + 2; ++b) {
      // Sum the stencil products c_a * c_b over every interior frame t whose
      // stencil covers both a and b.
      double weight = 0.0;
      for (std::size_t t = 1; t + 1 < frames_; ++t) {
        if (a + 1 >= t && a <= t + 1 && b + 1 >= t && b <= t + 1) {
          weight += stencil[a + 1 - t] * stencil[b + 1 - t];
        }
      }
      if (weight == 0.0) continue;
      Eigen::MatrixXd gram;
      if (a == b) {
        gram = Eigen::MatrixXd::Zero(kk, kk);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(basis[a].transpose());
        const Eigen::MatrixXd full = gram.selfadjointView<Eigen::Lower>();
        gram = full;
      } else {
        gram.noalias() = basis[a].transpose() * basis[b];
      }
      const auto ia = static_cast<Eigen::Index>(a) * kk;
      const auto ib = static_cast<Eigen::Index>(b) * kk;
      temporal_.block(ia, ib, kk, kk) += weight * temp_norm * gram;
      if (a != b) temporal_.block(ib, ia, kk, kk) += weight * temp_norm * gram.transpose();
    }
  }

  quad_ = config_.weights.alpha2 * bending_ + config_.weights.alpha3 * temporal_;
}

Eigen::MatrixX2d TemporalWarpProblem::to_matrix(const TpsSequenceParams& params) const {
  require(params.frame_count() == frames_ && params.point_count() == points_,
          ErrorKind::InvalidInput, "parameter sequence does not match the problem shape");
  Eigen::MatrixX2d theta(dimension(), 2);
  for (std::size_t t = 0; t < frames_; ++t) {
    const auto& f = params.frames[t];
    const auto at = static_cast<Eigen::Index>(t * coeffs_);
    theta.row(at) = f.a1.transpose();
    theta.row(at + 1) = f.ax.transpose();
    theta.row(at + 2) = f.ay.transpose();
    theta.block(at + 3, 0, static_cast<Eigen::Index>(points_), 2) = f.w;
  }
  return theta;
}

TpsSequenceParams TemporalWarpProblem::to_params(const Eigen::MatrixX2d& theta) const {
  TpsSequenceParams out;
  out.frames.reserve(frames_);
  for (std::size_t t = 0; t < frames_; ++t) {
    const auto at = static_cast<Eigen::Index>(t * coeffs_);
    TpsFrameParams f;
    f.a1 = theta.row(at).transpose();
    f.ax = theta.row(at + 1).transpose();
    f.ay = theta.row(at + 2).transpose();
    f.w = theta.block(at + 3, 0, static_cast<Eigen::Index>(points_), 2);
    f.centers = centers_[t];
    f.distance = config_.solve.distance;
    out.frames.push_back(std::move(f));
  }
  return out;
}

double TemporalWarpProblem::fit_value(const Eigen::MatrixX2d& residual) const {
  double total = 0.0;
  const double eps = config_.huber_eps;
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    const double r = residual.data()[i];
    total += config_.fitting == FittingLoss::HuberL1 ? huber(r, eps) : r * r;
  }
  return total / static_cast<double>(frames_ * points_);
}

Eigen::MatrixX2d TemporalWarpProblem::residual(const Eigen::MatrixX2d& theta) const {
  // The design is block diagonal: frame t's landmarks only see frame t's coefficients.
  const auto p = static_cast<Eigen::Index>(points_);
  const auto kk = static_cast<Eigen::Index>(coeffs_);
  Eigen::MatrixX2d out(static_cast<Eigen::Index>(frames_) * p, 2);
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(frames_); ++t) {
    out.middleRows(t * p, p).noalias() = design_.block(t * p, t * kk, p, kk) * theta.middleRows(t * kk, kk);
  }
  return out - targets_;
}

double TemporalWarpProblem::objective(const Eigen::MatrixX2d& theta) const {
  const Eigen::MatrixX2d residual = this->residual(theta);
  const double quadratic = (theta.array() * (quad_ * theta).array()).sum();
  return config_.weights.alpha1 * fit_value(residual) + quadratic;
}

Eigen::MatrixX2d TemporalWarpProblem::gradient(const Eigen::MatrixX2d& theta) const {
  Eigen::MatrixX2d slope = residual(theta);
  for (Eigen::Index i = 0; i < slope.size(); ++i) {
    double& r = slope.data()[i];
    r = config_.fitting == FittingLoss::HuberL1 ? huber_slope(r, config_.huber_eps) : 2.0 * r;
  }
  const double fit_scale = config_.weights.alpha1 / static_cast<double>(frames_ * points_);
  Eigen::MatrixX2d grad = 2.0 * (quad_ * theta);
  const auto p = static_cast<Eigen::Index>(points_);
  const auto kk = static_cast<Eigen::Index>(coeffs_);
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(frames_); ++t) {
    grad.middleRows(t * kk, kk).noalias() +=
        fit_scale * (design_.block(t * p, t * kk, p, kk).transpose() * slope.middleRows(t * p, p));
  }
  return grad;
}

std::array<Eigen::MatrixXd, 2> TemporalWarpProblem::curvature(const Eigen::MatrixX2d& theta) const {
  const Eigen::MatrixX2d r = residual(theta);
  return {curvature_of(r, 0), curvature_of(r, 1)};
}

Eigen::MatrixXd TemporalWarpProblem::curvature_of(const Eigen::MatrixX2d& residual, int coord) const {
  const double fit_scale = config_.weights.alpha1 / static_cast<double>(frames_ * points_);
  const auto p = static_cast<Eigen::Index>(points_);
  const auto kk = static_cast<Eigen::Index>(coeffs_);
  Eigen::MatrixXd out = 2.0 * quad_;
  for (std::size_t t = 0; t < frames_; ++t) {
    const auto row = static_cast<Eigen::Index>(t) * p;
    const auto col = static_cast<Eigen::Index>(t) * kk;
    Eigen::VectorXd weights(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      weights(i) = config_.fitting == FittingLoss::HuberL1
                       ? huber_curvature(residual(row + i, coord), config_.huber_eps)
                       : 2.0;
    }
    const auto block = design_.block(row, col, p, kk);
    out.block(col, col, kk, kk).noalias() += fit_scale * (block.transpose() * weights.asDiagonal() * block);
  }
  return out;
}

EnergyReport TemporalWarpProblem::report(const Eigen::MatrixX2d& theta) const {
  EnergyReport r;
  const Eigen::MatrixX2d residual = this->residual(theta);
  r.e_f = residual.cwiseAbs().sum() / static_cast<double>(frames_ * points_);
  r.e_b = std::max(0.0, (theta.array() * (bending_ * theta).array()).sum());
  r.e_t = std::max(0.0, (theta.array() * (temporal_ * theta).array()).sum());
  const auto& w = config_.weights;
  r.l_tw = w.alpha1 * r.e_f + w.alpha2 * r.e_b + w.alpha3 * r.e_t;
  return r;
}

TpsSequenceParams init_naive(const LandmarkWindow& src, const LandmarkWindow& dst,
                             const TpsSolveOptions& options) {
  require(src.frame_count() == dst.frame_count() && src.point_count() == dst.point_count(),
          ErrorKind::InvalidInput, "source and target windows differ in shape");
  TpsSequenceParams out;
  out.frames.reserve(src.frame_count());
  for (std::size_t t = 0; t < src.frame_count(); ++t) {
    try {
      out.frames.push_back(solve_frame(src[t], dst[t], options));
    } catch (const Error& e) {
      throw Error(e.kind(), "frame " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

ParameterGradient objective_gradient(const TpsSequenceParams& params, const LandmarkWindow& src,
                                     const LandmarkWindow& dst, int width, int height,
                                     const OptimizerConfig& config) {
  OptimizerConfig cfg = config;
  if (!params.frames.empty()) cfg.solve.distance = params.frames.front().distance;
  const TemporalWarpProblem problem(src, dst, width, height, cfg);
  const Eigen::MatrixX2d g = problem.gradient(problem.to_matrix(params));
  ParameterGradient out;
  out.frames = problem.frames();
  out.points = problem.points();
  out.values = pack_parameters(problem.to_params(g));
  return out;
}

namespace {

/// Descent direction -H^{-1} g per output coordinate, with H Jacobi-scaled and
/// damped. H only changes when a residual crosses the Huber threshold, so the
/// factorization is kept until that happens.
class Preconditioner {
 public:
  Preconditioner(const TemporalWarpProblem& problem, const OptimizerConfig& config)
      : problem_(problem), config_(config) {}

  Eigen::MatrixX2d direction(const Eigen::MatrixX2d& theta, const Eigen::MatrixX2d& grad) {
    refresh(theta);
    Eigen::MatrixX2d dir(grad.rows(), 2);
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd rhs = scale_[c].asDiagonal() * grad.col(c);
      dir.col(c) = -(scale_[c].asDiagonal() * llt_[c].solve(rhs));
    }
    return dir;
  }

 private:
  void refresh(const Eigen::MatrixX2d& theta) {
    const Eigen::MatrixX2d residual = problem_.residual(theta);
    Eigen::Array<bool, Eigen::Dynamic, 2> pattern;
    if (config_.fitting == FittingLoss::HuberL1) {
      pattern = residual.array().abs() <= config_.huber_eps;
    } else {
      pattern.setConstant(1, 2, true);
    }
    for (int c = 0; c < 2; ++c) {
      // Each coordinate's curvature depends only on its own residual pattern.
      if (ready_[c] && (pattern.col(c) == pattern_.col(c)).all()) continue;
      ready_[c] = true;
      const Eigen::MatrixXd h = problem_.curvature_of(residual, c);
      scale_[c].resize(h.rows());
      for (Eigen::Index i = 0; i < h.rows(); ++i) {
        scale_[c](i) = h(i, i) > 0.0 ? 1.0 / std::sqrt(h(i, i)) : 1.0;
      }
      Eigen::MatrixXd scaled = scale_[c].asDiagonal() * h * scale_[c].asDiagonal();
      scaled.diagonal().array() += config_.damping;
      llt_[c].compute(scaled);
      require(llt_[c].info() == Eigen::Success, ErrorKind::NumericalFailure,
              "preconditioner factorization failed");
    }
    pattern_ = pattern;
  }

  const TemporalWarpProblem& problem_;
  const OptimizerConfig& config_;
  bool ready_[2] = {false, false};
  Eigen::Array<bool, Eigen::Dynamic, 2> pattern_;
  std::array<Eigen::VectorXd, 2> scale_;
  std::array<Eigen::LLT<Eigen::MatrixXd>, 2> llt_;
};

}  // namespace

WarpSolution optimize_from(const TpsSequenceParams& start, const LandmarkWindow& src,
                           const LandmarkWindow& dst, int width, int height,
                           const OptimizerConfig& config) {
  OptimizerConfig cfg = config;
  cfg.validate();
  if (!start.frames.empty()) cfg.solve.distance = start.frames.front().distance;
  const TemporalWarpProblem problem(src, dst, width, height, cfg);

  Eigen::MatrixX2d theta = problem.to_matrix(start);
  double value = problem.objective(theta);
  require(std::isfinite(value), ErrorKind::NumericalFailure, "non-finite objective at iteration 0");

  WarpSolution sol;
  sol.objective_trace.push_back(value);

  const bool track_exact = cfg.fitting == FittingLoss::HuberL1;
  const Eigen::MatrixX2d initial = theta;
  Eigen::MatrixX2d best = theta;
  double best_exact = problem.report(theta).l_tw;

  Preconditioner preconditioner(problem, cfg);
  double step_hint = cfg.initial_step;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::MatrixX2d grad = problem.gradient(theta);
    require(grad.allFinite(), ErrorKind::NumericalFailure,
            "non-finite gradient at iteration " + std::to_string(iter));
    const Eigen::MatrixX2d dir =
        cfg.precondition ? preconditioner.direction(theta, grad) : Eigen::MatrixX2d(-grad);
    const double slope = (grad.array() * dir.array()).sum();
    if (!(slope < 0.0) || std::sqrt(-slope) <= cfg.grad_tol) {
      sol.converged = true;
      break;
    }

    double step = cfg.precondition ? 1.0 : step_hint;
    bool accepted = false;
    Eigen::MatrixX2d candidate;
    double candidate_value = 0.0;
    while (step >= cfg.min_step) {
      candidate = theta + step * dir;
      candidate_value = problem.objective(candidate);
      if (std::isfinite(candidate_value) && candidate_value <= value + cfg.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack_factor;
    }
    if (!accepted) break;

    theta = std::move(candidate);
    value = candidate_value;
    step_hint = 2.0 * step;
    sol.iterations = iter + 1;
    sol.objective_trace.push_back(value);
    if (track_exact) {
      const double exact = problem.report(theta).l_tw;
      if (exact <= best_exact) {
        best_exact = exact;
        best = theta;
      }
    }
  }

  if (!track_exact) best = theta;
  sol.init_report = problem.report(initial);
  sol.final_report = problem.report(best);
  sol.params = problem.to_params(best);
  if (track_exact && sol.final_report.l_tw > sol.init_report.l_tw) {
    sol.params = start;
    sol.final_report = sol.init_report;
  }
  return sol;
}

WarpSolution optimize(const LandmarkWindow& src, const LandmarkWindow& dst, int width, int height,
                      const OptimizerConfig& config) {
  config.validate();
  const TpsSequenceParams start = init_naive(src, dst, config.solve);
  return optimize_from(start, src, dst, width, height, config);
}

}  // namespace tempowarp
