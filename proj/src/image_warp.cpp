#include "tempowarp/image_warp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tempowarp {

void SamplingConfig::validate() const {
  require(constant_value >= 0 && constant_value <= 255, ErrorKind::InvalidInput,
          "constant border value must lie in 0..255");
}

namespace {

double texel(const Image& image, int x, int y, int c, const SamplingConfig& config) {
  if (config.border == BorderMode::Constant &&
      (x < 0 || y < 0 || x >= image.width() || y >= image.height())) {
    return config.constant_value;
  }
  return image.clamped(x, y, c);
}

}  // namespace

double sample(const Image& image, double x, double y, int c, const SamplingConfig& config) {
  if (config.interpolation == Interpolation::Nearest) {
    return texel(image, static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)), c, config);
  }
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const double tx = x - fx;
  const double ty = y - fy;
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double top = (1.0 - tx) * texel(image, x0, y0, c, config) + tx * texel(image, x0 + 1, y0, c, config);
  const double bottom =
      (1.0 - tx) * texel(image, x0, y0 + 1, c, config) + tx * texel(image, x0 + 1, y0 + 1, c, config);
  return (1.0 - ty) * top + ty * bottom;
}

Image remap_frame(const Image& image, const TpsFrameParams& inverse_params,
                  const SamplingConfig& config) {
  config.validate();
  require(!image.empty(), ErrorKind::InvalidInput, "cannot remap an empty image");
  Image out(image.width(), image.height(), image.channels());
  const DenseField field = warp_field(inverse_params, image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Point2 s{field.fx(y, x), field.fy(y, x)};
      // Positions far outside the image behave like the border; bound them so the
      // integer conversion stays defined.
      const double sx = std::isfinite(s.x) ? std::clamp(s.x, -2.0, image.width() + 1.0) : 0.0;
      const double sy = std::isfinite(s.y) ? std::clamp(s.y, -2.0, image.height() + 1.0) : 0.0;
      for (int c = 0; c < image.channels(); ++c) {
        const double v = sample(image, sx, sy, c, config);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

ImageWindow remap_window(const ImageWindow& images, const TpsSequenceParams& inverse_seq,
                         const SamplingConfig& config) {
  require(images.size() == inverse_seq.frame_count(), ErrorKind::InvalidInput,
          "image window has " + std::to_string(images.size()) + " frames but the warp has " +
              std::to_string(inverse_seq.frame_count()));
  ImageWindow out;
  out.reserve(images.size());
  for (std::size_t t = 0; t < images.size(); ++t) {
    if (t > 0) {
      require(images[t].channels() == images[0].channels(), ErrorKind::InvalidInput,
              "image window mixes channel counts");
    }
    out.push_back(remap_frame(images[t], inverse_seq.frames[t], config));
  }
  return out;
}

}  // namespace tempowarp
