#include "tempowarp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tempowarp {

LipPairs default_inner_lip_pairs() {
  return {mouth::kInnerLipPairs.begin(), mouth::kInnerLipPairs.end()};
}

ApertureCurve lip_aperture(const LandmarkSequence& landmarks, const LipPairs& pairs) {
  require(!pairs.empty(), ErrorKind::InvalidInput, "lip aperture needs at least one landmark pair");
  require(landmarks.point_count() == mouth::kPointCount, ErrorKind::InvalidInput,
          "lip aperture needs the 39-point mouth convention");
  for (const auto& [upper, lower] : pairs) {
    require(upper < landmarks.point_count() && lower < landmarks.point_count(),
            ErrorKind::InvalidInput, "lip pair index out of range");
  }
  ApertureCurve curve;
  curve.fps = landmarks.fps();
  curve.samples.reserve(landmarks.frame_count());
  for (std::size_t t = 0; t < landmarks.frame_count(); ++t) {
    double total = 0.0;
    for (const auto& [upper, lower] : pairs) total += std::abs(landmarks[t][lower].y - landmarks[t][upper].y);
    curve.samples.push_back(total / static_cast<double>(pairs.size()));
  }
  return curve;
}

std::vector<double> resample_linear(const std::vector<double>& samples, std::size_t count) {
  require(!samples.empty() && count > 0, ErrorKind::InvalidInput, "cannot resample an empty curve");
  if (samples.size() == count) return samples;
  std::vector<double> out(count);
  if (samples.size() == 1 || count == 1) {
    std::fill(out.begin(), out.end(), samples.front());
    if (count == 1) out[0] = samples.front();
    return out;
  }
  const double span = static_cast<double>(samples.size() - 1);
  for (std::size_t k = 0; k < count; ++k) {
    const double pos = span * static_cast<double>(k) / static_cast<double>(count - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), samples.size() - 2);
    const double frac = pos - static_cast<double>(i);
    out[k] = (1.0 - frac) * samples[i] + frac * samples[i + 1];
  }
  return out;
}

double ssiou(const ApertureCurve& a, const ApertureCurve& b) {
  require(!a.samples.empty() && !b.samples.empty(), ErrorKind::InvalidInput, "ssiou needs non-empty curves");
  for (const auto* c : {&a, &b}) {
    for (double v : c->samples) {
      require(std::isfinite(v) && v >= 0.0, ErrorKind::InvalidInput, "aperture samples must be finite and nonnegative");
    }
  }
  const std::size_t n = std::max(a.samples.size(), b.samples.size());
  const auto ra = resample_linear(a.samples, n);
  const auto rb = resample_linear(b.samples, n);
  double inter = 0.0;
  double uni = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    inter += std::min(ra[t], rb[t]);
    uni += std::max(ra[t], rb[t]);
  }
  require(uni > 0.0, ErrorKind::UndefinedMetric, "ssiou is undefined for two all-zero curves");
  return inter / uni;
}

PhotometricResult photometric_error(const ImageWindow& gen, const ImageWindow& gt,
                                    const std::optional<MaskImage>& mask) {
  require(!gen.empty() && gen.size() == gt.size(), ErrorKind::InvalidInput,
          "generated and ground-truth windows differ in frame count");
  const int w = gen.front().width();
  const int h = gen.front().height();
  const int ch = gen.front().channels();
  for (std::size_t t = 0; t < gen.size(); ++t) {
    require(gen[t].width() == w && gen[t].height() == h && gen[t].channels() == ch &&
                gen[t].same_shape(gt[t]),
            ErrorKind::InvalidInput, "frame " + std::to_string(t) + " differs in shape");
  }
  if (mask) {
    require(mask->width == w && mask->height == h, ErrorKind::InvalidInput, "mask size differs from the frames");
  }

  PhotometricResult r;
  r.map = Eigen::ArrayXXd::Zero(h, w);
  for (std::size_t t = 0; t < gen.size(); ++t) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double d = 0.0;
        for (int c = 0; c < ch; ++c) d += std::abs(static_cast<int>(gen[t].at(x, y, c)) - static_cast<int>(gt[t].at(x, y, c)));
        r.map(y, x) += d / ch;
      }
    }
  }
  r.map /= static_cast<double>(gen.size());

  double total = 0.0;
  std::size_t counted = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask && mask->at(x, y) == 0) continue;
      total += r.map(y, x);
      ++counted;
    }
  }
  require(counted > 0, ErrorKind::InvalidInput, "mask selects no pixels");
  r.mean = total / static_cast<double>(counted);
  return r;
}

}  // namespace tempowarp
