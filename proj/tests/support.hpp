#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tempowarp/core_types.hpp"
#include "tempowarp/tps.hpp"
#include "tempowarp/warp_energy.hpp"

namespace twtest {

using tempowarp::Image;
using tempowarp::LandmarkFrame;
using tempowarp::LandmarkWindow;
using tempowarp::Point2;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  double normal(double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
};

/// Points drawn uniformly from a box, rejecting any closer than min_gap to an earlier one.
inline std::vector<Point2> spread_points(Rng& rng, std::size_t n, double lo, double hi,
                                         double min_gap = 4.0) {
  std::vector<Point2> pts;
  while (pts.size() < n) {
    const Point2 p{rng.uniform(lo, hi), rng.uniform(lo, hi)};
    bool ok = true;
    for (const auto& q : pts) ok = ok && std::hypot(p.x - q.x, p.y - q.y) >= min_gap;
    if (ok) pts.push_back(p);
  }
  return pts;
}

inline LandmarkFrame jittered(Rng& rng, const LandmarkFrame& f, double sigma) {
  std::vector<Point2> pts;
  for (const auto& p : f.points()) pts.push_back({p.x + rng.normal(sigma), p.y + rng.normal(sigma)});
  return LandmarkFrame(pts);
}

inline Image random_image(Rng& rng, int w, int h, int channels) {
  Image img(w, h, channels);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(rng.integer(0, 255));
  return img;
}

/// Smooth image: a couple of low-frequency sinusoids, values well inside 0..255.
inline Image smooth_image(Rng& rng, int w, int h, int channels) {
  Image img(w, h, channels);
  const double fx = rng.uniform(0.02, 0.1);
  const double fy = rng.uniform(0.02, 0.1);
  const double ph = rng.uniform(0.0, 6.28);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        const double v = 128.0 + 60.0 * std::sin(fx * x + ph + c) * std::cos(fy * y - c);
        img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(v));
      }
    }
  }
  return img;
}

/// Dense solve by Gaussian elimination with partial pivoting in long double.
inline std::vector<long double> gauss_solve(std::vector<std::vector<long double>> a,
                                            std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const long double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<long double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// r^2 ln r with the r = 0 limit, written out independently of the library.
inline long double oracle_u(long double r) { return r == 0.0L ? 0.0L : r * r * std::log(r); }

/// Classical interpolating TPS from src to dst, one output coordinate at a time.
/// Returns {w_0..w_{P-1}, a1, ax, ay} per coordinate.
inline std::array<std::vector<long double>, 2> oracle_tps(const std::vector<Point2>& src,
                                                          const std::vector<Point2>& dst) {
  const std::size_t n = src.size();
  std::vector<std::vector<long double>> sys(n + 3, std::vector<long double>(n + 3, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sys[i][j] = oracle_u(std::hypot(static_cast<long double>(src[i].x - src[j].x),
                                      static_cast<long double>(src[i].y - src[j].y)));
    }
    sys[i][n] = sys[n][i] = 1.0L;
    sys[i][n + 1] = sys[n + 1][i] = src[i].x;
    sys[i][n + 2] = sys[n + 2][i] = src[i].y;
  }
  std::array<std::vector<long double>, 2> out;
  for (int c = 0; c < 2; ++c) {
    std::vector<long double> rhs(n + 3, 0.0L);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = c == 0 ? dst[i].x : dst[i].y;
    out[c] = gauss_solve(sys, rhs);
  }
  return out;
}

struct PointL {
  long double x, y;
};

/// Field value written out term by term from the coefficients.
inline PointL oracle_eval_ld(const tempowarp::TpsFrameParams& p, Point2 q) {
  long double fx = p.a1(0) + static_cast<long double>(p.ax(0)) * q.x + static_cast<long double>(p.ay(0)) * q.y;
  long double fy = p.a1(1) + static_cast<long double>(p.ax(1)) * q.x + static_cast<long double>(p.ay(1)) * q.y;
  for (std::size_t i = 0; i < p.centers.size(); ++i) {
    const long double dx = static_cast<long double>(p.centers[i].x) - q.x;
    const long double dy = static_cast<long double>(p.centers[i].y) - q.y;
    const long double r = p.distance == tempowarp::DistanceMode::L1 ? std::fabs(dx) + std::fabs(dy)
                                                                    : std::sqrt(dx * dx + dy * dy);
    fx += p.w(static_cast<Eigen::Index>(i), 0) * oracle_u(r);
    fy += p.w(static_cast<Eigen::Index>(i), 1) * oracle_u(r);
  }
  return {fx, fy};
}

inline Point2 oracle_eval(const tempowarp::TpsFrameParams& p, Point2 q) {
  const auto v = oracle_eval_ld(p, q);
  return {static_cast<double>(v.x), static_cast<double>(v.y)};
}

/// Random coefficients anchored at the given centers.
inline tempowarp::TpsFrameParams random_params(Rng& rng, std::vector<Point2> centers, double wscale) {
  auto p = tempowarp::TpsFrameParams::identity(std::move(centers));
  for (int c = 0; c < 2; ++c) {
    p.a1(c) = rng.uniform(-2.0, 2.0);
    p.ax(c) += rng.uniform(-0.1, 0.1);
    p.ay(c) += rng.uniform(-0.1, 0.1);
    for (Eigen::Index i = 0; i < p.w.rows(); ++i) p.w(i, c) = rng.uniform(-wscale, wscale);
  }
  return p;
}

/// A 39-point mouth frame: lips on an ellipse-like outline around (cx, cy), jaw below.
inline LandmarkFrame mouth_frame(double cx, double cy, double aperture) {
  std::vector<Point2> p;
  const double hw = 30.0;
  const double pi = 3.14159265358979323846;
  p.push_back({cx - hw, cy});
  for (int k = 1; k <= 5; ++k) p.push_back({cx - hw + 2 * hw * k / 6.0, cy - (aperture / 2 + 7) * std::sin(pi * k / 6.0)});
  p.push_back({cx + hw, cy});
  for (int k = 5; k >= 1; --k) p.push_back({cx - hw + 2 * hw * k / 6.0, cy + (aperture / 2 + 9) * std::sin(pi * k / 6.0)});
  const double ih = 24.0;
  p.push_back({cx - ih, cy});
  for (int k = 1; k <= 3; ++k) p.push_back({cx - ih + 2 * ih * k / 4.0, cy - aperture / 2 * std::sin(pi * k / 4.0)});
  p.push_back({cx + ih, cy});
  for (int k = 3; k >= 1; --k) p.push_back({cx - ih + 2 * ih * k / 4.0, cy + aperture / 2 * std::sin(pi * k / 4.0)});
  for (int k = 0; k < 19; ++k) {
    const double a = pi * k / 18.0;
    p.push_back({cx - 55.0 * std::cos(a), cy - 2.0 + 45.0 * std::sin(a)});
  }
  return LandmarkFrame(p);
}

struct Grid {
  int w, h;
  std::vector<std::vector<PointL>> cells;  // [y][x]
};

inline Grid materialize(const tempowarp::TpsFrameParams& p, int w, int h) {
  Grid g{w, h, std::vector<std::vector<PointL>>(h, std::vector<PointL>(w))};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) g.cells[y][x] = oracle_eval_ld(p, {double(x), double(y)});
  }
  return g;
}

inline long double coord(const PointL& p, int c) { return c == 0 ? p.x : p.y; }

inline long double oracle_bending(const tempowarp::TpsSequenceParams& seq, int w, int h) {
  long double total = 0;
  for (const auto& f : seq.frames) {
    const Grid g = materialize(f, w, h);
    for (int c = 0; c < 2; ++c) {
      for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
          const auto v = [&](int dx, int dy) { return coord(g.cells[y + dy][x + dx], c); };
          const long double fxx = v(1, 0) - 2 * v(0, 0) + v(-1, 0);
          const long double fyy = v(0, 1) - 2 * v(0, 0) + v(0, -1);
          const long double fxy = (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1)) / 4.0L;
          total += fxx * fxx + 2 * fxy * fxy + fyy * fyy;
        }
      }
    }
  }
  return total / ((w - 2) * (h - 2) * static_cast<long double>(seq.frame_count()));
}

inline long double oracle_temporal(const tempowarp::TpsSequenceParams& seq, int w, int h) {
  std::vector<Grid> grids;
  for (const auto& f : seq.frames) grids.push_back(materialize(f, w, h));
  long double total = 0;
  for (std::size_t t = 1; t + 1 < grids.size(); ++t) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 2; ++c) {
          const long double d = coord(grids[t + 1].cells[y][x], c) - 2 * coord(grids[t].cells[y][x], c) +
                                coord(grids[t - 1].cells[y][x], c);
          total += d * d;
        }
      }
    }
  }
  return total / (static_cast<long double>(w) * h * (grids.size() - 2));
}

inline long double oracle_huber(long double r, long double eps) {
  const long double a = std::fabs(r);
  return a <= eps ? r * r / (2 * eps) : a - eps / 2;
}

/// Landmark residuals of the warped source, frame-major, x then y.
inline std::vector<long double> oracle_residuals(const tempowarp::TpsSequenceParams& seq,
                                                 const LandmarkWindow& src, const LandmarkWindow& dst) {
  std::vector<long double> out;
  for (std::size_t t = 0; t < seq.frame_count(); ++t) {
    for (std::size_t i = 0; i < src.point_count(); ++i) {
      const auto q = oracle_eval_ld(seq.frames[t], src[t][i]);
      out.push_back(q.x - dst[t][i].x);
      out.push_back(q.y - dst[t][i].y);
    }
  }
  return out;
}

/// Smoothed window objective assembled from materialized fields. With eps <= 0 the
/// landmark term is the squared residual instead of the Huber-smoothed L1.
inline long double oracle_smoothed_objective(const tempowarp::TpsSequenceParams& seq, const LandmarkWindow& src,
                                             const LandmarkWindow& dst, int w, int h,
                                             const tempowarp::EnergyWeights& weights, double eps) {
  long double fit = 0;
  for (const long double r : oracle_residuals(seq, src, dst)) fit += eps > 0 ? oracle_huber(r, eps) : r * r;
  fit /= static_cast<long double>(seq.frame_count() * src.point_count());
  return weights.alpha1 * fit + weights.alpha2 * oracle_bending(seq, w, h) +
         weights.alpha3 * oracle_temporal(seq, w, h);
}

}  // namespace twtest
