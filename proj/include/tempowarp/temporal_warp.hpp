#pragma once

#include <vector>

#include <Eigen/Core>

#include "tempowarp/core_types.hpp"
#include "tempowarp/tps.hpp"
#include "tempowarp/warp_energy.hpp"

namespace tempowarp {

/// Loss applied to landmark residuals while optimizing. Reports always use the exact L1.
enum class FittingLoss {
  HuberL1,    // smoothed |r|
  SquaredL2,  // r^2; a fully quadratic surrogate with a closed-form optimum
};

struct OptimizerConfig {
  EnergyWeights weights;
  int max_iters = 200;
  double huber_eps = 0.1;
  double grad_tol = 1e-6;
  double initial_step = 1e-2;
  double backtrack_factor = 0.5;
  double min_step = 1e-12;
  double armijo_c = 1e-4;
  FittingLoss fitting = FittingLoss::HuberL1;
  /// Scale descent directions by the inverse local curvature. Without it the
  /// raw gradient is followed, which crawls on the badly scaled TPS basis.
  bool precondition = true;
  /// Added to the unit diagonal of the scaled curvature. Directions the objective
  /// barely constrains then move only slowly away from the starting point.
  double damping = 1e-4;
  TpsSolveOptions solve;

  void validate() const;
};

/// Flat coefficient vector. Entry ((t * 2 + c) * (3 + P) + k) holds, for frame t and
/// output coordinate c, coefficient k in the order a1, ax, ay, w_0 .. w_{P-1}.
struct ParameterGradient {
  std::size_t frames = 0;
  std::size_t points = 0;
  Eigen::VectorXd values;

  std::size_t coefficients_per_frame() const { return 3 + points; }
  double operator()(std::size_t t, int coord, std::size_t k) const {
    return values(static_cast<Eigen::Index>((t * 2 + coord) * coefficients_per_frame() + k));
  }
  double norm() const { return values.norm(); }
};

Eigen::VectorXd pack_parameters(const TpsSequenceParams& params);
/// Inverse of pack_parameters; centers and distance mode are taken from `like`.
TpsSequenceParams unpack_parameters(const Eigen::VectorXd& flat, const TpsSequenceParams& like);

/// The smoothed objective as an explicit function of the coefficients. The warp
/// field is linear in the coefficients, so bending and temporal energies are
/// fixed quadratic forms assembled once per (src, grid) pair; only the landmark
/// term is non-quadratic.
class TemporalWarpProblem {
 public:
  TemporalWarpProblem(const LandmarkWindow& src, const LandmarkWindow& dst, int width, int height,
                      const OptimizerConfig& config);

  std::size_t frames() const { return frames_; }
  std::size_t points() const { return points_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(frames_ * coeffs_); }

  /// Coefficients as a (T * (3 + P)) x 2 matrix, one column per output coordinate.
  Eigen::MatrixX2d to_matrix(const TpsSequenceParams& params) const;
  TpsSequenceParams to_params(const Eigen::MatrixX2d& theta) const;

  double objective(const Eigen::MatrixX2d& theta) const;
  Eigen::MatrixX2d gradient(const Eigen::MatrixX2d& theta) const;
  /// Exact-L1 report computed from the quadratic forms.
  EnergyReport report(const Eigen::MatrixX2d& theta) const;
  /// Curvature used to precondition the gradient at theta (Hessian of the smoothed
  /// objective, one matrix per output coordinate).
  std::array<Eigen::MatrixXd, 2> curvature(const Eigen::MatrixX2d& theta) const;
  /// One coordinate's curvature given the landmark residuals.
  Eigen::MatrixXd curvature_of(const Eigen::MatrixX2d& residual, int coord) const;
  /// Warped landmarks minus targets, (T * P) x 2.
  Eigen::MatrixX2d residual(const Eigen::MatrixX2d& theta) const;

  const Eigen::MatrixXd& quadratic_form() const { return quad_; }
  const Eigen::MatrixXd& landmark_design() const { return design_; }
  const Eigen::MatrixX2d& landmark_targets() const { return targets_; }

 private:
  double fit_value(const Eigen::MatrixX2d& residual) const;

  std::size_t frames_ = 0;
  std::size_t points_ = 0;
  std::size_t coeffs_ = 0;
  OptimizerConfig config_;
  std::vector<std::vector<Point2>> centers_;
  Eigen::MatrixXd design_;   // (T*P) x (T*K), rows map coefficients to warped landmarks
  Eigen::MatrixX2d targets_;  // (T*P) x 2
  Eigen::MatrixXd bending_;   // E_b = sum_c theta_c' B theta_c
  Eigen::MatrixXd temporal_;  // E_t = sum_c theta_c' E theta_c
  Eigen::MatrixXd quad_;      // alpha2 B + alpha3 E
};

struct WarpSolution {
  TpsSequenceParams params;
  EnergyReport init_report;
  EnergyReport final_report;
  int iterations = 0;
  bool converged = false;
  /// Smoothed objective at the start and after every accepted step.
  std::vector<double> objective_trace;
};

/// Per-frame interpolating TPS solutions.
TpsSequenceParams init_naive(const LandmarkWindow& src, const LandmarkWindow& dst,
                             const TpsSolveOptions& options = {});

ParameterGradient objective_gradient(const TpsSequenceParams& params, const LandmarkWindow& src,
                                     const LandmarkWindow& dst, int width, int height,
                                     const OptimizerConfig& config);

/// Joint minimisation of the window objective starting from init_naive.
WarpSolution optimize(const LandmarkWindow& src, const LandmarkWindow& dst, int width, int height,
                      const OptimizerConfig& config = {});

/// Same, from a caller-supplied starting point (centers must match src).
WarpSolution optimize_from(const TpsSequenceParams& start, const LandmarkWindow& src,
                           const LandmarkWindow& dst, int width, int height,
                           const OptimizerConfig& config = {});

}  // namespace tempowarp
