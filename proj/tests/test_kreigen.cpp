#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "shiftlab/error.hpp"
#include "shiftlab/kreigen.hpp"

using namespace shiftlab;
using std::numbers::pi;

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

PeriodicFunction constant(double v, int G) {
  return PeriodicFunction::sample([v](double) { return v; }, 2 * pi, G);
}

IntegralOperatorSpec spec_of(std::function<double(double)> r, std::function<double(double)> rho,
                             int G) {
  IntegralOperatorSpec s{PeriodicFunction::sample(r, 2 * pi, G),
                         PeriodicFunction::sample(rho, 2 * pi, G), std::nullopt};
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("apply_L on closed forms") {
  const int G = 512;
  const auto unit = spec_of([](double) { return 1.0; }, [](double) { return 1.0; }, G);
  for (double v : apply_L(unit, constant(1.0, G)).samples) CHECK(v == doctest::Approx(1.0));

  const auto full = spec_of([](double) { return 2 * pi; }, [](double) { return 1.0; }, G);
  const auto sine = PeriodicFunction::sample([](double t) { return std::sin(t); }, 2 * pi, G);
  for (double v : apply_L(full, sine).samples) CHECK(std::abs(v) < 1e-12);

  // integral of 1 over a window of length r(t) is r(t) itself
  const auto wobble = spec_of([](double t) { return 2 + std::sin(t); }, [](double) { return 1.0; }, G);
  const auto lx = apply_L(wobble, constant(1.0, G));
  for (int j = 0; j < G; ++j) CHECK(lx.samples[j] == doctest::Approx(2 + std::sin(lx.node(j))));

  // x = cos against the exact sin(t) - sin(t - r(t)), second order in 1/G
  const auto cosx = [](int g) { return PeriodicFunction::sample([](double t) { return std::cos(t); }, 2 * pi, g); };
  const auto err = [&](int g) {
    const auto s = spec_of([](double t) { return 2 + std::sin(t); }, [](double) { return 1.0; }, g);
    const auto l = apply_L(s, cosx(g));
    double e = 0;
    for (int j = 0; j < g; ++j) {
      const double t = l.node(j);
      e = std::max(e, std::abs(l.samples[j] - (std::sin(t) - std::sin(t - 2 - std::sin(t)))));
    }
    return e;
  };
  const double e1 = err(256), e2 = err(512);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));

  CHECK(code_of([&] { apply_L(unit, constant(1.0, 256)); }) == ErrorCode::GridMismatch);
}

TEST_CASE("power_iteration") {
  SUBCASE("constant delay") {
    const auto s = spec_of([](double) { return 1.7; }, [](double) { return 1.0; }, 256);
    const auto r = power_iteration(s, 1e-12, 1000);
    CHECK(r.kappa == doctest::Approx(1.7).epsilon(1e-12));
    for (double v : r.x.samples) CHECK(v == doctest::Approx(1.0));
    const auto b = verify_bounds(s, r);
    CHECK(b.ok);
    CHECK(b.lo == doctest::Approx(1.7));
    CHECK(b.hi == doctest::Approx(1.7));
  }
  SUBCASE("sine family lambda=7, m=2") {
    const auto s = IntegralOperatorSpec::sine_family(7.0, 2, 512);
    const auto r = power_iteration(s, 1e-12, 20000);
    CHECK(r.kappa >= 4 * pi - 6);
    CHECK(r.kappa <= 4 * pi + 6);
    CHECK(r.residual <= 1e-12);
    const auto b = verify_bounds(s, r);
    CHECK(b.ok);
    CHECK(b.lo == doctest::Approx(4 * pi - 6).epsilon(1e-4));
    CHECK(b.hi == doctest::Approx(4 * pi + 6).epsilon(1e-4));
    CHECK(r.bound_lo == b.lo);
    for (double v : r.x.samples) CHECK(v > 0.0);

    // Collatz-Wielandt sandwich
    const auto lx = apply_L(s, r.x);
    double lo = 1e300, hi = 0;
    for (int j = 0; j < r.x.G(); ++j) {
      lo = std::min(lo, lx.samples[j] / r.x.samples[j]);
      hi = std::max(hi, lx.samples[j] / r.x.samples[j]);
    }
    CHECK(lo <= r.kappa + 1e-10);
    CHECK(r.kappa <= hi + 1e-10);

    // independent of the positive starting guess
    const auto start = PeriodicFunction::sample([](double t) { return 2 + std::cos(3 * t); }, 2 * pi, 512);
    const auto r2 = power_iteration(s, 1e-12, 20000, start);
    CHECK(r2.kappa == doctest::Approx(r.kappa).epsilon(1e-10));
    for (int j = 0; j < 512; ++j) CHECK(std::abs(r2.x.samples[j] - r.x.samples[j]) <= 1e-8);

    // grid doubling: second-order convergence of kappa
    const double k256 = power_iteration(IntegralOperatorSpec::sine_family(7.0, 2, 256), 1e-13, 20000).kappa;
    const double k1024 = power_iteration(IntegralOperatorSpec::sine_family(7.0, 2, 1024), 1e-13, 20000).kappa;
    const double ratio = (k256 - r.kappa) / (r.kappa - k1024);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
  }
  SUBCASE("iteration budget") {
    const auto s = IntegralOperatorSpec::sine_family(7.0, 2, 128);
    CHECK(code_of([&] { power_iteration(s, 1e-12, 2); }) == ErrorCode::NoConvergence);
  }
}

TEST_CASE("verify_bounds rejects an eigenvalue outside the window range") {
  const auto s = spec_of([](double) { return 1.0; }, [](double) { return 1.0; }, 64);
  EigenResult fake{5.0, constant(1.0, 64), 0.0, 0.0, 0.0, 0};
  CHECK_FALSE(verify_bounds(s, fake).ok);
}

TEST_CASE("spec validation") {
  CHECK(code_of([] { spec_of([](double t) { return std::sin(t); }, [](double) { return 1.0; }, 64); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { PeriodicFunction::sample([](double) { return 1.0; }, 2 * pi, 100); }) ==
        ErrorCode::InvalidArgument);
  IntegralOperatorSpec mixed{constant(1.0, 64), constant(1.0, 128), std::nullopt};
  CHECK(code_of([&] { mixed.validate(); }) == ErrorCode::GridMismatch);
}

TEST_CASE("to_ode_coefficients") {
  const double lambda = 7.0;
  const auto s = IntegralOperatorSpec::sine_family(lambda, 2, 256);
  const EigenResult r{12.0, constant(1.0, 256), 0.0, 0.0, 0.0, 0};

  const auto dde = to_ode_coefficients(s, r, 2, 0.0, 12);
  CHECK(dde.a == TruncatedSeries::constant(0.0, 1.0 / 12.0, 12));
  // b(t) = -(1 + (lambda - 1) cos t) / kappa
  double fact = 1.0;
  for (int n = 0; n <= 12; ++n) {
    if (n > 0) fact *= n;
    const double cosn = (n % 2 == 0) ? ((n / 2) % 2 == 0 ? 1.0 : -1.0) / fact : 0.0;
    CHECK(dde.b[n] == doctest::Approx(-((n == 0) + (lambda - 1) * cosn) / 12.0).epsilon(1e-14));
  }
  CHECK(dde.map.jet(0.0, 9) == ShiftMap(SineShift{lambda}).jet(0.0, 9));

  CHECK(code_of([&] { to_ode_coefficients(s, r, 1, 0.0, 5); }) == ErrorCode::BranchNotFixed);

  // the same operator without the closed-form tag goes through spectral jets
  IntegralOperatorSpec sampled{s.r, s.rho, std::nullopt};
  const auto spectral = to_ode_coefficients(sampled, r, 2, 0.0, 12);
  for (int n = 0; n <= 12; ++n) {
    CHECK(std::abs(spectral.a[n] - dde.a[n]) <= 1e-12);
    CHECK(std::abs(spectral.b[n] - dde.b[n]) <= 1e-12);
  }
  const auto ej = spectral.map.jet(0.0, 12);
  const auto ex = dde.map.jet(0.0, 12);
  for (int n = 0; n <= 12; ++n) CHECK(std::abs(ej[n] - ex[n]) <= 1e-12);
  CHECK(code_of([&] { to_ode_coefficients(sampled, r, 3, 0.0, 5); }) == ErrorCode::BranchNotFixed);
}

TEST_CASE("spectral_jet of a trigonometric polynomial") {
  const auto f = PeriodicFunction::sample([](double t) { return 1 + 0.5 * std::cos(2 * t) - std::sin(t); }, 2 * pi, 128);
  const double t = 0.7;
  const auto j = spectral_jet(f, t, 4);
  CHECK(j[0] == doctest::Approx(1 + 0.5 * std::cos(2 * t) - std::sin(t)).epsilon(1e-13));
  CHECK(j[1] == doctest::Approx(-std::sin(2 * t) - std::cos(t)).epsilon(1e-13));
  CHECK(j[2] == doctest::Approx((-2 * std::cos(2 * t) + std::sin(t)) / 2).epsilon(1e-13));
}

TEST_CASE("eigenfunction csv round trip") {
  const auto x = PeriodicFunction::sample([](double t) { return 1.5 + std::sin(t) / 3; }, 2 * pi, 64);
  std::stringstream io;
  write_eigenfunction_csv(io, x);
  CHECK(io.str().rfind("t,x\n", 0) == 0);
  CHECK(read_eigenfunction_csv(io, 2 * pi).samples == x.samples);
}
