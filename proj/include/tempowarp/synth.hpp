#pragma once

#include <cstdint>

#include "tempowarp/core_types.hpp"

namespace tempowarp {

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t frames = 36;
  double jitter = 1.0;  // std-dev of per-coordinate landmark noise, px
  int width = 256;
  int height = 256;
  double fps = 30.0;
};

/// A rendered mouth clip. Frames are drawn from the clean landmarks; `landmarks`
/// adds the per-frame jitter a detector would introduce.
struct SynthClip {
  ImageSequence frames;
  LandmarkSequence landmarks;
  LandmarkSequence clean;
};

/// Deterministic for a given config: an ellipse-based mouth following a smooth
/// random aperture trajectory, on a textured skin background.
SynthClip synthesize(const SynthConfig& config);

}  // namespace tempowarp
