#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "tempowarp/compositing.hpp"
#include "tempowarp/core_types.hpp"

namespace tempowarp {

struct ApertureCurve {
  std::vector<double> samples;
  double fps = 30.0;
};

using LipPairs = std::vector<std::array<std::size_t, 2>>;

LipPairs default_inner_lip_pairs();

/// Per frame, mean |dy| over the upper/lower inner-lip pairs.
ApertureCurve lip_aperture(const LandmarkSequence& landmarks,
                           const LipPairs& pairs = default_inner_lip_pairs());

/// Linear resampling of a curve onto `count` evenly spaced samples over the same span.
std::vector<double> resample_linear(const std::vector<double>& samples, std::size_t count);

/// Sum min / sum max of the two curves on a shared time grid.
double ssiou(const ApertureCurve& a, const ApertureCurve& b);

struct PhotometricResult {
  double mean = 0.0;
  /// Per-pixel mean over frames and channels of |gen - gt| (rows = y).
  Eigen::ArrayXXd map;
};

PhotometricResult photometric_error(const ImageWindow& gen, const ImageWindow& gt,
                                    const std::optional<MaskImage>& mask = std::nullopt);

}  // namespace tempowarp
