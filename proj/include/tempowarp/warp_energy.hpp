#pragma once

#include "tempowarp/core_types.hpp"
#include "tempowarp/tps.hpp"

namespace tempowarp {

struct EnergyWeights {
  double alpha1 = 1.0;  // fitting error
  double alpha2 = 1.0;  // bending energy
  double alpha3 = 1.0;  // temporal regularization

  void validate() const;
};

struct EnergyReport {
  double e_f = 0.0;
  double e_b = 0.0;
  double e_t = 0.0;
  double l_tw = 0.0;
};

/// Mean L1 distance between warped source landmarks and target landmarks.
double fitting_error(const TpsSequenceParams& params, const LandmarkWindow& src,
                     const LandmarkWindow& dst);

/// Mean of f_xx^2 + 2 f_xy^2 + f_yy^2 over interior grid cells and frames, summed
/// over both output coordinates. Derivatives are unit-spacing central differences.
double bending_energy(const TpsSequenceParams& params, int width, int height);

/// Mean of f_tt^2 over all grid cells and interior frames, summed over both
/// output coordinates. f_tt is the second difference across consecutive frames.
double temporal_energy(const TpsSequenceParams& params, int width, int height);

EnergyReport total_objective(const TpsSequenceParams& params, const LandmarkWindow& src,
                             const LandmarkWindow& dst, int width, int height,
                             const EnergyWeights& weights);

}  // namespace tempowarp
