#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "tempowarp/core_types.hpp"

using namespace tempowarp;
using twtest::Rng;

namespace {

LandmarkFrame with_lips(const std::vector<Point2>& lips) {
  std::vector<Point2> pts(lips);
  for (int k = 0; k < 19; ++k) pts.push_back({static_cast<double>(k), 100.0});
  return LandmarkFrame(pts);
}

void check_kind(ErrorKind expected, auto&& fn) {
  try {
    fn();
    FAIL("no error raised");
  } catch (const Error& e) {
    CHECK(e.kind() == expected);
  }
}

}  // namespace

TEST_CASE("landmark types reject malformed input") {
  check_kind(ErrorKind::InvalidInput, [] { LandmarkFrame({{0.0, std::nan("")}}); });
  check_kind(ErrorKind::InvalidInput, [] { LandmarkFrame({{std::numeric_limits<double>::infinity(), 0.0}}); });
  check_kind(ErrorKind::InvalidInput, [] {
    LandmarkWindow({LandmarkFrame({{0, 0}, {1, 1}}), LandmarkFrame({{0, 0}})});
  });
  check_kind(ErrorKind::InvalidInput, [] { LandmarkWindow(std::vector<LandmarkFrame>{}); });
  check_kind(ErrorKind::InvalidInput, [] { LandmarkWindow({LandmarkFrame({{0, 0}})}, 0.0); });

  const LandmarkWindow w({LandmarkFrame({{0, 0}}), LandmarkFrame({{1, 0}}), LandmarkFrame({{2, 0}})});
  CHECK(w.fps() == 30.0);
  CHECK(w.slice(1, 2)[0][0].x == 1.0);
  check_kind(ErrorKind::InvalidInput, [&] { (void)w.slice(2, 2); });
}

TEST_CASE("image buffer invariants") {
  const Image img(4, 3, 3, 7);
  CHECK(img.pixels().size() == 36);
  check_kind(ErrorKind::InvalidInput, [] { Image(2, 2, 2); });
  check_kind(ErrorKind::InvalidInput, [] { Image(2, 2, 1, std::vector<std::uint8_t>(3)); });
  Image g(3, 2, 1);
  g.at(2, 1) = 9;
  CHECK(g.clamped(10, 10) == 9);
  CHECK(g.clamped(-4, -4) == 0);
}

TEST_CASE("crop spec must be positive and even") {
  check_kind(ErrorKind::InvalidInput, [] { CropSpec{147}.validate(); });
  check_kind(ErrorKind::InvalidInput, [] { CropSpec{0}.validate(); });
  CropSpec{148}.validate();
}

TEST_CASE("mouth_center examples") {
  SUBCASE("identical lip points") {
    const auto c = mouth_center(with_lips(std::vector<Point2>(20, {10.0, 20.0})));
    CHECK(c.x == doctest::Approx(10.0));
    CHECK(c.y == doctest::Approx(20.0));
  }
  SUBCASE("regular 20-gon") {
    std::vector<Point2> lips;
    for (int k = 0; k < 20; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 20.0;
      lips.push_back({74.0 + 30.0 * std::cos(a), 74.0 + 30.0 * std::sin(a)});
    }
    const auto c = mouth_center(with_lips(lips));
    CHECK(c.x == doctest::Approx(74.0).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(74.0).epsilon(1e-12));
  }
  SUBCASE("random lips against a direct mean, translation equivariance") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Point2> lips;
      long double sx = 0, sy = 0;
      for (int k = 0; k < 20; ++k) {
        lips.push_back({rng.uniform(0, 300), rng.uniform(0, 300)});
        sx += lips.back().x;
        sy += lips.back().y;
      }
      const auto frame = with_lips(lips);
      const auto c = mouth_center(frame);
      CHECK(c.x == doctest::Approx(static_cast<double>(sx / 20)).epsilon(1e-12));
      CHECK(c.y == doctest::Approx(static_cast<double>(sy / 20)).epsilon(1e-12));
      const Point2 d{rng.uniform(-50, 50), rng.uniform(-50, 50)};
      const auto moved = mouth_center(frame.translated(d));
      CHECK(moved.x == doctest::Approx(c.x + d.x).epsilon(1e-12));
      CHECK(moved.y == doctest::Approx(c.y + d.y).epsilon(1e-12));
    }
  }
  SUBCASE("wrong point count") {
    check_kind(ErrorKind::ConventionViolation, [] { mouth_center(LandmarkFrame({{0, 0}, {1, 1}, {2, 0}})); });
  }
}

TEST_CASE("crop_mouth examples") {
  Rng rng(5);
  SUBCASE("interior crop spans rows and cols 76..223") {
    const Image img = twtest::random_image(rng, 300, 300, 3);
    const Image out = crop_at(img, {150.0, 150.0}, {});
    REQUIRE(out.width() == 148);
    REQUIRE(out.height() == 148);
    CHECK(out.at(0, 0, 1) == img.at(76, 76, 1));
    CHECK(out.at(147, 147, 2) == img.at(223, 223, 2));
  }
  SUBCASE("random centers against a clamped pixel-copy oracle") {
    for (int trial = 0; trial < 20; ++trial) {
      const Image img = twtest::random_image(rng, rng.integer(20, 200), rng.integer(20, 200), trial % 2 ? 3 : 1);
      const Point2 c{rng.uniform(-30, 230), rng.uniform(-30, 230)};
      const CropSpec spec{2 * rng.integer(1, 40)};
      const Image out = crop_at(img, c, spec);
      const int x0 = static_cast<int>(std::lround(c.x)) - spec.side / 2;
      const int y0 = static_cast<int>(std::lround(c.y)) - spec.side / 2;
      bool same = true;
      for (int y = 0; y < spec.side; ++y) {
        for (int x = 0; x < spec.side; ++x) {
          const int sx = std::min(std::max(x0 + x, 0), img.width() - 1);
          const int sy = std::min(std::max(y0 + y, 0), img.height() - 1);
          for (int ch = 0; ch < img.channels(); ++ch) same = same && out.at(x, y, ch) == img.at(sx, sy, ch);
        }
      }
      CHECK(same);
    }
  }
  SUBCASE("crop near the border replicates edge pixels") {
    const Image img = twtest::random_image(rng, 300, 300, 1);
    const Image out = crop_at(img, {10.0, 10.0}, {});
    CHECK(out.at(0, 0) == img.at(0, 0));
    CHECK(out.at(63, 10) == img.at(0, 0));
    CHECK(out.at(64, 64) == img.at(0, 0));
    CHECK(out.at(65, 65) == img.at(1, 1));
  }
  SUBCASE("crop of an in-bounds crop is idempotent in content") {
    const Image img = twtest::random_image(rng, 300, 300, 3);
    const Image once = crop_at(img, {150.0, 140.0}, {});
    CHECK(crop_at(once, {74.0, 74.0}, {}) == once);
  }
  SUBCASE("mouth crop uses the lip mean") {
    const Image img = twtest::random_image(rng, 300, 300, 3);
    const auto frame = with_lips(std::vector<Point2>(20, {150.0, 150.0}));
    CHECK(crop_mouth(img, frame, {}) == crop_at(img, {150.0, 150.0}, {}));
  }
  SUBCASE("empty image") {
    check_kind(ErrorKind::InvalidInput, [] { crop_at(Image(0, 0, 1), {0, 0}, {}); });
  }
}

TEST_CASE("align_face") {
  const LandmarkFrame ref({{30, 40}, {70, 41}, {50, 60}, {35, 80}, {66, 79}});
  SUBCASE("identity") {
    const auto t = align_face(ref, ref);
    CHECK((t.linear - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(t.translation.cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("pure translation") {
    const auto shifted = ref.translated({5.0, -3.0});
    const auto t = align_face(shifted, ref);
    CHECK((t.linear - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(t.translation.x() == doctest::Approx(-5.0));
    CHECK(t.translation.y() == doctest::Approx(3.0));
  }
  SUBCASE("random pairs against normal equations") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<Point2> a, b;
      for (int i = 0; i < 5; ++i) {
        a.push_back({rng.uniform(0, 200), rng.uniform(0, 200)});
        b.push_back({rng.uniform(0, 200), rng.uniform(0, 200)});
      }
      const auto t = align_face(LandmarkFrame(a), LandmarkFrame(b));
      // Normal equations (X'X) beta = X'Y solved by elimination.
      std::vector<std::vector<long double>> xtx(3, std::vector<long double>(3, 0));
      std::array<std::vector<long double>, 2> xty{std::vector<long double>(3, 0), std::vector<long double>(3, 0)};
      for (int i = 0; i < 5; ++i) {
        const long double row[3] = {a[i].x, a[i].y, 1.0L};
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) xtx[r][c] += row[r] * row[c];
          xty[0][r] += row[r] * b[i].x;
          xty[1][r] += row[r] * b[i].y;
        }
      }
      for (int out = 0; out < 2; ++out) {
        const auto beta = twtest::gauss_solve(xtx, xty[out]);
        CHECK(std::abs(t.linear(out, 0) - static_cast<double>(beta[0])) <= 1e-8);
        CHECK(std::abs(t.linear(out, 1) - static_cast<double>(beta[1])) <= 1e-8);
        CHECK(std::abs(t.translation(out) - static_cast<double>(beta[2])) <= 1e-8);
      }
    }
  }
  SUBCASE("degenerate inputs") {
    check_kind(ErrorKind::DegenerateConfiguration, [&] {
      align_face(LandmarkFrame({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}}), ref);
    });
    check_kind(ErrorKind::DegenerateConfiguration, [&] {
      align_face(LandmarkFrame(std::vector<Point2>(5, {3, 3})), ref);
    });
    check_kind(ErrorKind::InvalidInput, [&] { align_face(LandmarkFrame({{0, 0}, {1, 0}, {0, 1}}), ref); });
  }
  SUBCASE("apply maps frames") {
    AffineTransform t;
    t.linear << 2, 0, 0, 3;
    t.translation << 1, -1;
    const auto p = t.apply(Point2{1, 1});
    CHECK(p == Point2{3, 2});
  }
}
