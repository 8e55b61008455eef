#include <doctest.h>

#include <cmath>

#include "patchtrack/errors.hpp"
#include "patchtrack/motion.hpp"
#include "patchtrack/prng.hpp"

using namespace patchtrack;

namespace {

bool symmetric_to(const Eigen::Matrix<double, 8, 8>& p, double tol) {
  return (p - p.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool diagonal_positive(const Eigen::Matrix<double, 8, 8>& p) {
  return (p.diagonal().array() > 0.0).all();
}

}  // namespace

TEST_CASE("kf_init encodes the box") {
  const KalmanState s = kf_init(BBox{0, 0, 10, 20});
  CHECK(s.mean(0) == 5.0);
  CHECK(s.mean(1) == 10.0);
  CHECK(s.mean(2) == 0.5);
  CHECK(s.mean(3) == 20.0);
  CHECK(s.mean.tail<4>().isZero());
  CHECK(diagonal_positive(s.covariance));

  const BBox back = state_to_bbox(s);
  CHECK(back.x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(back.y == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(back.w == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(back.h == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("kf_predict advances by the velocity") {
  KalmanState s = kf_init(BBox{10, 10, 10, 10});
  SUBCASE("zero velocity keeps the position and grows the covariance") {
    const KalmanState next = kf_predict(s);
    CHECK(next.mean(0) == s.mean(0));
    CHECK(next.mean(1) == s.mean(1));
    for (int i = 0; i < 8; ++i) {
      CHECK(next.covariance(i, i) > s.covariance(i, i));
    }
  }
  SUBCASE("velocity shifts the center") {
    s.mean << 0, 0, 1, 10, 2, 3, 0, 0;
    const KalmanState next = kf_predict(s);
    CHECK(next.mean(0) == 2.0);
    CHECK(next.mean(1) == 3.0);
  }
}

TEST_CASE("kf_update contracts toward the observation") {
  KalmanState s = kf_init(BBox{0, 0, 10, 20});
  s = kf_predict(s);

  SUBCASE("zero innovation leaves the mean") {
    const BBox predicted = state_to_bbox(s);
    const KalmanState next = kf_update(s, predicted);
    CHECK((next.mean - s.mean).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(next.covariance.trace() < s.covariance.trace());
  }
  SUBCASE("repeated updates converge to a disjoint fixed box") {
    // Each operating cycle contracts the offset by ~0.75; twenty cycles pull
    // a non-overlapping initialization under a tenth of a pixel.
    KalmanState state = kf_init(BBox{0, 0, 10, 20});
    const BBox target{15, 15, 10, 20};
    for (int i = 0; i < 20; ++i) {
      state = kf_predict(state);
      state = kf_update(state, target);
    }
    const BBox got = state_to_bbox(state);
    CHECK(std::abs(got.cx() - target.cx()) < 0.1);
    CHECK(std::abs(got.cy() - target.cy()) < 0.1);
  }
}

TEST_CASE("noiseless constant velocity converges under 0.5 px") {
  KalmanState s = kf_init(BBox{0, 0, 20, 40});
  double err = 1e9;
  for (int f = 1; f <= 12; ++f) {
    s = kf_predict(s);
    const BBox truth{5.0 * f, 0, 20, 40};
    err = std::abs(state_to_bbox(s).cx() - truth.cx());
    s = kf_update(s, truth);
  }
  CHECK(err < 0.5);
}

TEST_CASE("covariance stays symmetric positive through random stress") {
  Xoshiro256pp rng(1234);
  KalmanState s = kf_init(BBox{100, 100, 20, 50});
  for (int i = 0; i < 10000; ++i) {
    s = kf_predict(s);
    CHECK(symmetric_to(s.covariance, 1e-9));
    CHECK(diagonal_positive(s.covariance));
    const BBox obs{100 + rng.uniform(-30.0, 30.0), 100 + rng.uniform(-30.0, 30.0),
                   10 + rng.uniform(0.0, 30.0), 30 + rng.uniform(0.0, 40.0)};
    const double before = s.covariance.trace();
    s = kf_update(s, obs);
    CHECK(symmetric_to(s.covariance, 1e-9));
    CHECK(diagonal_positive(s.covariance));
    CHECK(s.covariance.trace() <= before);
    CHECK(s.mean(3) > 0.0);
  }
}

TEST_CASE("state_to_bbox round trip and degenerate error") {
  Xoshiro256pp rng(55);
  for (int i = 0; i < 100; ++i) {
    const BBox b{rng.uniform(-50.0, 400.0), rng.uniform(-50.0, 400.0),
                 rng.uniform(0.5, 80.0), rng.uniform(0.5, 80.0)};
    const BBox back = state_to_bbox(kf_init(b));
    CHECK(std::abs(back.x - b.x) <= 1e-9);
    CHECK(std::abs(back.y - b.y) <= 1e-9);
    CHECK(std::abs(back.w - b.w) <= 1e-9);
    CHECK(std::abs(back.h - b.h) <= 1e-9);
  }

  KalmanState degenerate;
  degenerate.mean << 0, 0, 1.0, 1e-12, 0, 0, 0, 0;
  CHECK_THROWS_AS(state_to_bbox(degenerate), DegenerateStateError);
}
