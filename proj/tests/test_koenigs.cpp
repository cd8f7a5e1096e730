#include <cmath>

#include "doctest.h"
#include "shiftlab/error.hpp"
#include "shiftlab/koenigs.hpp"

using namespace shiftlab;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("affine maps are already linear") {
  const auto r = koenigs_series(Affine{3.0, 1.5}, 1.5, 8);
  CHECK(r.sigma == TruncatedSeries::identity(1.5, 8));
  CHECK(r.residual == 0.0);
  CHECK(r.lambda == 3.0);
}

TEST_CASE("hand-matched low-order coefficients") {
  // eta = 2 t + t^2: (lambda^2 - lambda) sigma_2 = 1
  const ShiftMap quad(SeriesMap{TruncatedSeries(0.0, {0.0, 2.0, 1.0, 0, 0, 0, 0})});
  const auto r = koenigs_series(quad, 0.0, 6);
  CHECK(r.sigma[0] == 0.0);
  CHECK(r.sigma[1] == 1.0);
  CHECK(r.sigma[2] == doctest::Approx(0.5));
  CHECK(verify_conjugacy(r, quad, 1e-12));

  for (double lambda : {5.0, 7.0, 13.0, 0.5, -3.0}) {
    CAPTURE(lambda);
    const auto s = koenigs_series(SineShift{lambda}, 0.0, 30);
    CHECK(s.sigma[2] == 0.0);
    CHECK(s.sigma[3] == doctest::Approx(-1.0 / (6 * lambda * (lambda + 1))).epsilon(1e-13));
    for (int n = 0; n <= 30; n += 2) CHECK(std::abs(s.sigma[n]) <= 1e-12);
    CHECK(s.residual <= 1e-9);
    CHECK(verify_conjugacy(s, SineShift{lambda}, 1e-9));
  }
}

TEST_CASE("conjugacy at a non-zero fixed point") {
  // pi is fixed by t + (lambda - 1) sin t with multiplier 2 - lambda
  const double pi = std::acos(-1.0);
  const auto r = koenigs_series(SineShift{7.0}, pi, 20);
  CHECK(r.lambda == doctest::Approx(-5.0));
  CHECK(r.sigma[0] == pi);
  CHECK(r.residual <= 1e-9);
  // eta(sigma(pi + s)) = sigma(pi + lambda s), checked pointwise
  const ShiftMap m(SineShift{7.0});
  for (double s : {-0.02, 0.01, 0.03}) {
    CHECK(m.value(r.sigma.evaluate(pi + s)) ==
          doctest::Approx(r.sigma.evaluate(pi + r.lambda * s)).epsilon(1e-10));
  }
}

TEST_CASE("broken conjugacy is detected") {
  const auto r = koenigs_series(SineShift{7.0}, 0.0, 10);
  std::vector<double> c(r.sigma.coeffs().begin(), r.sigma.coeffs().end());
  c[3] += 1e-3;
  const ConjugacyResult bad{TruncatedSeries(0.0, c), r.lambda, 0.0};
  CHECK_FALSE(verify_conjugacy(bad, SineShift{7.0}, 1e-9));
}

TEST_CASE("guards") {
  CHECK(code_of([] { koenigs_series(SineShift{7.0}, 0.5, 5); }) == ErrorCode::NotFixedPoint);
  CHECK(code_of([] { koenigs_series(Affine{1.0, 0.0}, 0.0, 5); }) ==
        ErrorCode::NeutralMultiplier);
  CHECK(code_of([] { koenigs_series(SineShift{0.0}, 0.0, 5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("zeta iteration agrees with coefficient matching") {
  SUBCASE("coefficient bound for lambda = 100") {
    const auto z = zeta_iteration(100.0, 10, 100);
    for (int n = 2; n <= 10; ++n) CHECK(std::abs(z[n]) <= 0.01);
    const auto k = koenigs_series(SineShift{100.0}, 0.0, 10);
    for (int n = 0; n <= 10; ++n) CHECK(std::abs(z[n] - k.sigma[n]) <= 1e-10);
  }
  SUBCASE("quadratic bound for lambda = 50") {
    const auto z = zeta_iteration(50.0, 30, 200);
    for (int i = 1; i <= 10; ++i) {
      const double t = 0.1 * i;
      CHECK(std::abs(z.evaluate(t) - t) <= t * t / 50.0);
    }
  }
  SUBCASE("lambda = 13") {
    const auto z = zeta_iteration(13.0, 30, 200);
    const auto k = koenigs_series(SineShift{13.0}, 0.0, 30);
    for (int n = 0; n <= 30; ++n) CHECK(std::abs(z[n] - k.sigma[n]) <= 1e-9);
  }
  CHECK(code_of([] { zeta_iteration(5.0, 10, 10); }) == ErrorCode::InvalidArgument);
}
