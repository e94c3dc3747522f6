#include "tempowarp/warp_energy.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace tempowarp {

void EnergyWeights::validate() const {
  for (double a : {alpha1, alpha2, alpha3}) {
    require(std::isfinite(a) && a >= 0.0, ErrorKind::InvalidInput,
            "energy weights must be finite and nonnegative");
  }
}

namespace {

void check_window_shapes(const TpsSequenceParams& params, const LandmarkWindow& src,
                         const LandmarkWindow& dst) {
  params.validate();
  require(src.frame_count() == params.frame_count() && dst.frame_count() == params.frame_count(),
          ErrorKind::InvalidInput, "frame counts of parameters and landmark windows differ");
  require(src.point_count() == params.point_count() && dst.point_count() == params.point_count(),
          ErrorKind::InvalidInput, "point counts of parameters and landmark windows differ");
}

}  // namespace

double fitting_error(const TpsSequenceParams& params, const LandmarkWindow& src,
                     const LandmarkWindow& dst) {
  check_window_shapes(params, src, dst);
  const auto frames = params.frame_count();
  const auto points = params.point_count();
  double total = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < points; ++i) {
      const Point2 mapped = eval_point(params.frames[t], src[t][i]);
      total += std::abs(mapped.x - dst[t][i].x) + std::abs(mapped.y - dst[t][i].y);
    }
  }
  return total / static_cast<double>(frames * points);
}

namespace {

std::vector<DenseField> all_fields(const TpsSequenceParams& params, int width, int height) {
  std::vector<DenseField> fields;
  fields.reserve(params.frame_count());
  for (const auto& frame : params.frames) fields.push_back(warp_field(frame, width, height));
  return fields;
}

double bending_of(const std::vector<DenseField>& fields, int width, int height) {
  double total = 0.0;
  for (const auto& field : fields) {
    for (const Eigen::ArrayXXd* f : {&field.fx, &field.fy}) {
      const auto& g = *f;
      for (int y = 1; y + 1 < height; ++y) {
        for (int x = 1; x + 1 < width; ++x) {
          const double fxx = g(y, x + 1) - 2.0 * g(y, x) + g(y, x - 1);
          const double fyy = g(y + 1, x) - 2.0 * g(y, x) + g(y - 1, x);
          const double fxy =
              0.25 * (g(y + 1, x + 1) - g(y - 1, x + 1) - g(y + 1, x - 1) + g(y - 1, x - 1));
          total += fxx * fxx + 2.0 * fxy * fxy + fyy * fyy;
        }
      }
    }
  }
  const double interior = static_cast<double>(width - 2) * static_cast<double>(height - 2);
  return total / (interior * static_cast<double>(fields.size()));
}

double temporal_of(const std::vector<DenseField>& fields, int width, int height) {
  double total = 0.0;
  for (std::size_t t = 1; t + 1 < fields.size(); ++t) {
    total += (fields[t + 1].fx - 2.0 * fields[t].fx + fields[t - 1].fx).square().sum() +
             (fields[t + 1].fy - 2.0 * fields[t].fy + fields[t - 1].fy).square().sum();
  }
  const double cells = static_cast<double>(width) * static_cast<double>(height);
  return total / (cells * static_cast<double>(fields.size() - 2));
}

void check_bending_grid(int width, int height) {
  require(width >= 3 && height >= 3, ErrorKind::InvalidInput,
          "bending energy needs at least a 3x3 grid");
}

void check_temporal(const TpsSequenceParams& params, int width, int height) {
  require(params.frame_count() >= 3, ErrorKind::InsufficientData,
          "temporal energy needs at least 3 frames, got " + std::to_string(params.frame_count()));
  require(width >= 1 && height >= 1, ErrorKind::InvalidInput, "temporal energy needs a non-empty grid");
}

}  // namespace

double bending_energy(const TpsSequenceParams& params, int width, int height) {
  params.validate();
  check_bending_grid(width, height);
  return bending_of(all_fields(params, width, height), width, height);
}

double temporal_energy(const TpsSequenceParams& params, int width, int height) {
  params.validate();
  check_temporal(params, width, height);
  return temporal_of(all_fields(params, width, height), width, height);
}

EnergyReport total_objective(const TpsSequenceParams& params, const LandmarkWindow& src,
                             const LandmarkWindow& dst, int width, int height,
                             const EnergyWeights& weights) {
  weights.validate();
  EnergyReport r;
  r.e_f = fitting_error(params, src, dst);
  check_bending_grid(width, height);
  check_temporal(params, width, height);
  const auto fields = all_fields(params, width, height);
  r.e_b = bending_of(fields, width, height);
  r.e_t = temporal_of(fields, width, height);
  r.l_tw = weights.alpha1 * r.e_f + weights.alpha2 * r.e_b + weights.alpha3 * r.e_t;
  return r;
}

}  // namespace tempowarp
