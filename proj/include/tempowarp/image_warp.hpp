#pragma once

#include <cstdint>

#include "tempowarp/core_types.hpp"
#include "tempowarp/tps.hpp"

namespace tempowarp {

enum class Interpolation { Bilinear, Nearest };
enum class BorderMode { Clamp, Constant };

struct SamplingConfig {
  Interpolation interpolation = Interpolation::Bilinear;
  BorderMode border = BorderMode::Clamp;
  int constant_value = 0;

  void validate() const;
};

/// Sample channel c of `image` at a real-valued position.
double sample(const Image& image, double x, double y, int c, const SamplingConfig& config);

/// Backward warp: output pixel (x, y) pulls the source at eval_point(inverse_params, (x, y)).
Image remap_frame(const Image& image, const TpsFrameParams& inverse_params,
                  const SamplingConfig& config = {});

ImageWindow remap_window(const ImageWindow& images, const TpsSequenceParams& inverse_seq,
                         const SamplingConfig& config = {});

}  // namespace tempowarp
