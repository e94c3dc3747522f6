#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "tempowarp/compositing.hpp"

using namespace tempowarp;
using twtest::Rng;

namespace {

void check_kind(ErrorKind expected, auto&& fn) {
  try {
    fn();
    FAIL("no error raised");
  } catch (const Error& e) {
    CHECK(e.kind() == expected);
  }
}

bool inside_even_odd(const std::vector<Point2>& poly, double px, double py) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    auto a = poly[i];
    auto b = poly[j];
    if ((a.y > py) == (b.y > py)) continue;
    if (b.y < a.y) std::swap(a, b);
    if (px < a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y)) in = !in;
  }
  return in;
}

int max_diff(const Image& a, const Image& b) {
  int worst = 0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i) worst = std::max(worst, std::abs(a.pixels()[i] - b.pixels()[i]));
  return worst;
}

/// True when every pixel within Chebyshev distance r of (x, y) shares its mask value.
bool far_from_boundary(const MaskImage& m, int x, int y, int r) {
  for (int yy = std::max(0, y - r); yy <= std::min(m.height - 1, y + r); ++yy) {
    for (int xx = std::max(0, x - r); xx <= std::min(m.width - 1, x + r); ++xx) {
      if (m.at(xx, yy) != m.at(x, y)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("mouth_mask") {
  SUBCASE("apex plus semicircular jaw matches a point-in-polygon oracle") {
    const auto frame = twtest::mouth_frame(64, 50, 10);
    const auto poly = mouth_polygon(frame);
    REQUIRE(poly.size() == 20);
    const auto mask = mouth_mask(frame, 128, 110);
    int bad = 0;
    for (int y = 0; y < 110; ++y) {
      for (int x = 0; x < 128; ++x) bad += mask.at(x, y) != (inside_even_odd(poly, x, y) ? 1 : 0);
    }
    CHECK(bad == 0);
    CHECK(mask.count() > 0);
    CHECK(mask.count() < mask.values.size());
  }
  SUBCASE("apex is the landmark with minimal y") {
    const auto frame = twtest::mouth_frame(64, 50, 10);
    std::size_t top = 0;
    for (std::size_t i = 0; i < 39; ++i) {
      if (frame[i].y < frame[top].y) top = i;
    }
    CHECK(mouth_polygon(frame).front() == frame[top]);
  }
  SUBCASE("integer translation translates the mask") {
    const auto frame = twtest::mouth_frame(60, 45, 12);
    const auto a = mouth_mask(frame, 128, 128);
    const auto b = mouth_mask(frame.translated({7, 5}), 128, 128);
    int bad = 0;
    for (int y = 0; y + 5 < 128; ++y) {
      for (int x = 0; x + 7 < 128; ++x) bad += a.at(x, y) != b.at(x + 7, y + 5);
    }
    CHECK(bad == 0);
  }
  SUBCASE("collinear jaw and apex") {
    std::vector<Point2> pts(39);
    for (std::size_t i = 0; i < 39; ++i) pts[i] = {double(i), 10.0};
    check_kind(ErrorKind::DegenerateMask, [&] { mouth_mask(LandmarkFrame(pts), 64, 64); });
  }
  SUBCASE("wrong convention") {
    check_kind(ErrorKind::ConventionViolation, [] { mouth_mask(LandmarkFrame({{0, 0}, {1, 0}, {0, 1}}), 8, 8); });
  }
}

TEST_CASE("fill_polygon") {
  const auto m = fill_polygon({{1.5, 1.5}, {5.5, 1.5}, {5.5, 4.5}, {1.5, 4.5}}, 8, 8);
  CHECK(m.count() == 12);
  CHECK(m.at(2, 2) == 1);
  CHECK(m.at(1, 2) == 0);
  CHECK(m.at(5, 4) == 1);
  CHECK(m.at(2, 5) == 0);
}

TEST_CASE("laplacian_blend identities") {
  Rng rng(3);
  const auto mask = mouth_mask(twtest::mouth_frame(64, 50, 10), 128, 112);
  SUBCASE("fg == bg") {
    for (int trial = 0; trial < 5; ++trial) {
      const Image img = twtest::random_image(rng, 128, 112, 3);
      CHECK(max_diff(laplacian_blend(img, img, mask), img) <= 1);
    }
  }
  SUBCASE("all-ones mask") {
    const Image fg = twtest::random_image(rng, 128, 112, 3);
    const Image bg = twtest::random_image(rng, 128, 112, 3);
    CHECK(max_diff(laplacian_blend(fg, bg, MaskImage(128, 112, 1)), fg) <= 1);
    CHECK(max_diff(laplacian_blend(fg, bg, MaskImage(128, 112, 0)), bg) <= 1);
  }
  SUBCASE("one level equals a direct blend with the once-smoothed mask") {
    const Image fg = twtest::random_image(rng, 40, 36, 3);
    const Image bg = twtest::random_image(rng, 40, 36, 3);
    const auto m = mouth_mask(twtest::mouth_frame(20, 14, 6), 40, 36);
    const double taps[5] = {1, 4, 6, 4, 1};
    const Image out = laplacian_blend(fg, bg, m, {.levels = 1});
    int bad = 0;
    for (int y = 0; y < 36; ++y) {
      for (int x = 0; x < 40; ++x) {
        double s = 0;
        for (int dy = -2; dy <= 2; ++dy) {
          for (int dx = -2; dx <= 2; ++dx) {
            s += taps[dx + 2] * taps[dy + 2] * m.at(std::clamp(x + dx, 0, 39), std::clamp(y + dy, 0, 35));
          }
        }
        s /= 256.0;
        for (int c = 0; c < 3; ++c) {
          const double v = s * fg.at(x, y, c) + (1 - s) * bg.at(x, y, c);
          bad += std::abs(out.at(x, y, c) - std::lround(v)) > 0;
        }
      }
    }
    CHECK(bad == 0);
  }
  SUBCASE("pixels far from the mask boundary keep their side") {
    const Image fg = twtest::random_image(rng, 128, 112, 1);
    const Image bg = twtest::random_image(rng, 128, 112, 1);
    const Image out = laplacian_blend(fg, bg, mask);
    int bad = 0, checked = 0;
    for (int y = 0; y < 112; ++y) {
      for (int x = 0; x < 128; ++x) {
        if (!far_from_boundary(mask, x, y, 16)) continue;
        const int want = mask.at(x, y) ? fg.at(x, y) : bg.at(x, y);
        bad += std::abs(out.at(x, y) - want) > 1;
        ++checked;
      }
    }
    CHECK(checked > 1000);
    CHECK(bad == 0);
  }
  SUBCASE("blending is idempotent on identical inputs") {
    const Image img = twtest::smooth_image(rng, 128, 112, 3);
    const Image once = laplacian_blend(img, img, mask);
    CHECK(max_diff(laplacian_blend(once, once, mask), once) <= 1);
  }
  SUBCASE("errors") {
    const Image a = twtest::random_image(rng, 32, 32, 3);
    check_kind(ErrorKind::InvalidInput, [&] { laplacian_blend(a, twtest::random_image(rng, 32, 31, 3), MaskImage(32, 32)); });
    check_kind(ErrorKind::InvalidInput, [&] { laplacian_blend(a, a, MaskImage(31, 32)); });
    check_kind(ErrorKind::InvalidInput, [&] { laplacian_blend(a, a, MaskImage(32, 32), {.levels = 6}); });
    check_kind(ErrorKind::InvalidInput, [&] { laplacian_blend(a, a, MaskImage(32, 32), {.levels = 0}); });
  }
}

TEST_CASE("retarget") {
  Rng rng(4);
  const Image face = twtest::random_image(rng, 200, 180, 3);
  SUBCASE("pasting a crop from the same place is a no-op") {
    const Image crop = crop_at(face, {100, 90}, {.side = 60});
    CHECK(retarget(face, crop, {100, 90}) == face);
  }
  SUBCASE("center placement fills the central block") {
    const Image crop(40, 40, 3, 7);
    const Image out = retarget(face, crop, {100, 90});
    CHECK(out.at(80, 70, 0) == 7);
    CHECK(out.at(119, 109, 2) == 7);
    CHECK(out.at(79, 70, 0) == face.at(79, 70, 0));
    CHECK(out.at(120, 109, 0) == face.at(120, 109, 0));
  }
  SUBCASE("random placements match a pixel-copy oracle") {
    for (int trial = 0; trial < 10; ++trial) {
      const Image crop = twtest::random_image(rng, 30, 30, 3);
      const Point2 c{rng.uniform(-10, 210), rng.uniform(-10, 190)};
      const Image out = retarget(face, crop, c);
      Image want = face;
      const int x0 = static_cast<int>(std::lround(c.x)) - 15;
      const int y0 = static_cast<int>(std::lround(c.y)) - 15;
      for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 30; ++x) {
          if (x0 + x < 0 || x0 + x >= 200 || y0 + y < 0 || y0 + y >= 180) continue;
          for (int ch = 0; ch < 3; ++ch) want.at(x0 + x, y0 + y, ch) = crop.at(x, y, ch);
        }
      }
      CHECK(out == want);
    }
  }
  SUBCASE("errors") {
    check_kind(ErrorKind::InvalidInput, [&] { retarget(face, Image(201, 10, 3), {100, 90}); });
    check_kind(ErrorKind::InvalidInput, [&] { retarget(face, Image(10, 10, 1), {100, 90}); });
  }
}
