#include "tempowarp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace tempowarp {

namespace {

constexpr double kPi = std::numbers::pi;

struct MouthState {
  double cx = 0.0;
  double cy = 0.0;
  double half_width = 30.0;
  double aperture = 6.0;  // inner-lip gap at the centre line
  double upper_lip = 7.0;
  double lower_lip = 9.0;
  double jaw_rx = 58.0;
  double jaw_ry = 45.0;
  double jaw_top = 0.0;  // y of the jaw endpoints
};

struct Trajectory {
  double amp[3];
  double freq[3];
  double phase[6];
};

Trajectory draw_trajectory(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Trajectory tr{};
  for (int k = 0; k < 3; ++k) {
    tr.amp[k] = 2.0 + 4.0 * unit(rng) / (k + 1);
    tr.freq[k] = (0.6 + 1.6 * unit(rng)) * (k + 1) / 30.0;  // cycles per frame
  }
  for (double& p : tr.phase) p = 2.0 * kPi * unit(rng);
  return tr;
}

MouthState mouth_at(const Trajectory& tr, double t, int width, int height) {
  MouthState m;
  m.cx = width / 2.0 + 5.0 * std::sin(2.0 * kPi * t / 97.0 + tr.phase[3]);
  m.cy = height / 2.0 + 10.0 + 3.0 * std::sin(2.0 * kPi * t / 71.0 + tr.phase[4]);
  double a = 7.0;
  for (int k = 0; k < 3; ++k) a += tr.amp[k] * std::sin(2.0 * kPi * tr.freq[k] * t + tr.phase[k]);
  m.aperture = std::max(1.0, a);
  m.half_width = 30.0 + 2.5 * std::sin(2.0 * kPi * t / 53.0 + tr.phase[5]) - 0.15 * m.aperture;
  m.jaw_ry = 45.0 + 0.5 * m.aperture;
  m.jaw_top = m.cy - 2.0;
  return m;
}

std::vector<Point2> mouth_landmarks(const MouthState& m) {
  std::vector<Point2> p;
  p.reserve(mouth::kPointCount);
  const double top_o = m.aperture / 2.0 + m.upper_lip;
  const double bot_o = m.aperture / 2.0 + m.lower_lip;
  const double left_o = m.cx - m.half_width;
  p.push_back({left_o, m.cy});
  for (int k = 1; k <= 5; ++k) {
    const double s = k / 6.0;
    p.push_back({left_o + 2.0 * m.half_width * s, m.cy - top_o * std::sin(kPi * s)});
  }
  p.push_back({m.cx + m.half_width, m.cy});
  for (int k = 5; k >= 1; --k) {
    const double s = k / 6.0;
    p.push_back({left_o + 2.0 * m.half_width * s, m.cy + bot_o * std::sin(kPi * s)});
  }
  const double inner_half = 0.8 * m.half_width;
  const double left_i = m.cx - inner_half;
  p.push_back({left_i, m.cy});
  for (int k = 1; k <= 3; ++k) {
    const double s = k / 4.0;
    p.push_back({left_i + 2.0 * inner_half * s, m.cy - 0.5 * m.aperture * std::sin(kPi * s)});
  }
  p.push_back({m.cx + inner_half, m.cy});
  for (int k = 3; k >= 1; --k) {
    const double s = k / 4.0;
    p.push_back({left_i + 2.0 * inner_half * s, m.cy + 0.5 * m.aperture * std::sin(kPi * s)});
  }
  for (std::size_t j = 0; j < mouth::kJawCount; ++j) {
    const double theta = kPi - kPi * static_cast<double>(j) / (mouth::kJawCount - 1);
    p.push_back({m.cx + m.jaw_rx * std::cos(theta), m.jaw_top + m.jaw_ry * std::sin(theta)});
  }
  return p;
}

double coverage(double y, double top, double bottom) {
  return std::clamp(0.5 + std::min(y - top, bottom - y), 0.0, 1.0);
}

Image render(const MouthState& m, const SynthConfig& cfg, double head_dx, double head_dy) {
  Image img(cfg.width, cfg.height, 3);
  const double skin[3] = {201.0, 152.0, 128.0};
  const double lip[3] = {168.0, 72.0, 82.0};
  const double cavity[3] = {58.0, 22.0, 30.0};
  const double teeth[3] = {232.0, 226.0, 214.0};
  const double inner_half = 0.8 * m.half_width;
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      const double u = x - head_dx;
      const double v = y - head_dy;
      const double tex = 9.0 * std::sin(0.31 * u) * std::sin(0.23 * v) + 5.0 * std::sin(0.11 * u + 0.07 * v);
      double px[3] = {skin[0] + tex, skin[1] + tex, skin[2] + tex};

      // chin crease along the jaw contour
      if (y > m.jaw_top) {
        const double ex = (x - m.cx) / m.jaw_rx;
        const double ey = (y - m.jaw_top) / m.jaw_ry;
        const double d = (std::sqrt(ex * ex + ey * ey) - 1.0) * std::min(m.jaw_rx, m.jaw_ry);
        const double shade = 40.0 * std::exp(-d * d / 6.0);
        for (double& c : px) c -= shade;
      }

      const double so = (x - (m.cx - m.half_width)) / (2.0 * m.half_width);
      if (so > 0.0 && so < 1.0) {
        const double sn = std::sin(kPi * so);
        const double cov = coverage(y, m.cy - (m.aperture / 2.0 + m.upper_lip) * sn,
                                    m.cy + (m.aperture / 2.0 + m.lower_lip) * sn);
        const double shine = 18.0 * std::exp(-std::pow((y - (m.cy + m.aperture / 2.0 + 4.0 * sn)) / 2.5, 2));
        for (int c = 0; c < 3; ++c) px[c] = (1.0 - cov) * px[c] + cov * (lip[c] + shine);
      }
      const double si = (x - (m.cx - inner_half)) / (2.0 * inner_half);
      if (si > 0.0 && si < 1.0) {
        const double sn = std::sin(kPi * si);
        const double top = m.cy - 0.5 * m.aperture * sn;
        const double cov = coverage(y, top, m.cy + 0.5 * m.aperture * sn);
        const double tooth = std::clamp(3.5 - (y - top), 0.0, 1.0);
        for (int c = 0; c < 3; ++c) {
          const double inner = (1.0 - tooth) * cavity[c] + tooth * teeth[c];
          px[c] = (1.0 - cov) * px[c] + cov * inner;
        }
      }
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(px[c]), 0L, 255L));
      }
    }
  }
  return img;
}

}  // namespace

SynthClip synthesize(const SynthConfig& config) {
  require(config.frames >= 1, ErrorKind::InvalidInput, "synthetic clip needs at least one frame");
  require(config.jitter >= 0.0 && std::isfinite(config.jitter), ErrorKind::InvalidInput,
          "jitter must be finite and nonnegative");
  require(config.width >= 160 && config.height >= 160, ErrorKind::InvalidInput,
          "synthetic frames must be at least 160x160");

  std::mt19937_64 rng(config.seed);
  const Trajectory tr = draw_trajectory(rng);
  std::normal_distribution<double> noise(0.0, 1.0);

  SynthClip clip;
  std::vector<LandmarkFrame> clean;
  std::vector<LandmarkFrame> noisy;
  for (std::size_t f = 0; f < config.frames; ++f) {
    const double t = static_cast<double>(f);
    const MouthState m = mouth_at(tr, t, config.width, config.height);
    auto pts = mouth_landmarks(m);
    clip.frames.push_back(render(m, config, m.cx - config.width / 2.0, m.cy - config.height / 2.0));
    clean.emplace_back(pts);
    for (auto& p : pts) {
      p.x += config.jitter * noise(rng);
      p.y += config.jitter * noise(rng);
    }
    noisy.emplace_back(std::move(pts));
  }
  clip.clean = LandmarkSequence(std::move(clean), config.fps);
  clip.landmarks = LandmarkSequence(std::move(noisy), config.fps);
  return clip;
}

}  // namespace tempowarp
