#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shiftlab/error.hpp"
#include "shiftlab/pipeline.hpp"

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

// Brute-force partial sums and products, no closed forms.
double omega_by_partial_sums(double lambda) {
  const double K = 55.0;
  double sum = 1.0 / lambda, prod = 1.0 + 1.0 / lambda;
  for (int n = 1; n < 4000; ++n) {
    const double h = std::pow(2.0 / lambda, n) * K;
    sum += h;
    prod *= 1.0 + h;
  }
  return sum * prod;
}

PantographForm sine_form(double lambda, double kappa, const ConjugacyResult& conj, int order) {
  const ShiftMap eta(SineShift{lambda});
  const auto deta = differentiate(eta.jet(0.0, order + 1));
  std::vector<double> b(static_cast<std::size_t>(order) + 1);
  for (int n = 0; n <= order; ++n) b[n] = -deta[n] / kappa;
  const LocalLinearDDE dde{TruncatedSeries::constant(0.0, 1.0 / kappa, order),
                           TruncatedSeries(0.0, b), TruncatedSeries::zero(0.0, order), eta, 0.0};
  return to_pantograph(dde, conj, order - 1);
}

}  // namespace

TEST_CASE("Omega constants") {
  CHECK(omega_constant() == doctest::Approx(55.0).epsilon(1e-15));
  for (double lambda : {2.5, 4.0, 13.0, 100.0, 1000.0}) {
    CHECK(omega_bound(lambda) == doctest::Approx(omega_by_partial_sums(lambda)).epsilon(1e-11));
  }
  CHECK(omega_bound(13.0) == doctest::Approx(294.05221731046549).epsilon(1e-13));
  // the sum factor alone
  CHECK(omega_bound(13.0) / (1.0 / 13 + 55.0 * 2.0 / 11.0) > 1.0);

  double prev = omega_bound(2.1);
  for (double lambda = 2.5; lambda < 1e4; lambda *= 1.7) {
    const double w = omega_bound(lambda);
    CHECK(w < prev);
    prev = w;
  }
  CHECK(omega_bound(1e9) < 1e-6);

  const double star = omega_threshold();
  CHECK(omega_bound(star) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(omega_bound(star * 1.001) < 1.0);
  CHECK(omega_bound(star * 0.999) > 1.0);

  CHECK(code_of([] { omega_bound(2.0); }) == ErrorCode::LambdaTooSmall);
  CHECK(code_of([] { omega_bound(1.5); }) == ErrorCode::LambdaTooSmall);
}

TEST_CASE("sine-family recursion") {
  SUBCASE("identity conjugacy telescopes") {
    const ConjugacyResult id{TruncatedSeries::identity(0.0, 30), 5.0, 0.0};
    const auto d = w_sequence_sine(9.0, id, 5.0, 2.0, 30);
    double w = 2.0;
    for (int n = 0; n < 30; ++n) {
      w *= 1.0 - std::pow(5.0, -(n + 1));
      CHECK(d.w[n + 1] == doctest::Approx(w).epsilon(1e-15));
    }
  }
  SUBCASE("homogeneous") {
    const auto conj = koenigs_series(ShiftMap(SineShift{7.0}), 0.0, 40);
    for (double v : w_sequence_sine(12.0, conj, 7.0, 0.0, 40).w) CHECK(v == 0.0);
  }
  SUBCASE("agrees with the general recursion at lambda = 13") {
    const double lambda = 13.0;
    const double kappa =
        power_iteration(IntegralOperatorSpec::sine_family(lambda, 2, 512), 1e-12, 20000).kappa;
    const int N = 200;
    const auto conj = koenigs_series(ShiftMap(SineShift{lambda}), 0.0, N);
    const auto form = sine_form(lambda, kappa, conj, N);
    const auto general = w_sequence(form, 0.8, N);
    const auto special = w_sequence_sine(kappa, conj, lambda, 0.8, N);
    for (int n = 0; n <= N; ++n) {
      CHECK(std::abs(general.w[n] - special.w[n]) <= 1e-9 * std::abs(general.w[n]));
    }
  }
  SUBCASE("direct rescaling of the Taylor coefficients") {
    // w_k = xi_k y_k with xi_k = (-kappa)^k k! / lambda^{k(k+1)/2}
    const double lambda = 7.0, kappa = 12.0;
    const int N = 14;
    const auto conj = koenigs_series(ShiftMap(SineShift{lambda}), 0.0, N + 1);
    const auto y = taylor_coefficients(sine_form(lambda, kappa, conj, N + 1), 1.0, N);
    const auto w = w_sequence_sine(kappa, conj, lambda, 1.0, N).w;
    double xi = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) xi *= -kappa * k / std::pow(lambda, k);
      CHECK(w[k] == doctest::Approx(xi * y[k]).epsilon(1e-11));
    }
  }
  CHECK(code_of([] {
          const auto conj = koenigs_series(ShiftMap(SineShift{7.0}), 0.0, 10);
          w_sequence_sine(12.0, conj, 7.0, 1.0, 20);
        }) == ErrorCode::JetTooShort);
}

TEST_CASE("coexistence at lambda = 7.4, m = 2, n = 1") {
  const CoexistenceReport r = run_coexistence({});
  CHECK(r.kappa_in_bounds);
  CHECK(r.eigen.kappa >= 4 * pi - 6.4);
  CHECK(r.eigen.kappa <= 4 * pi + 6.4);
  CHECK(r.eigen.kappa == doctest::Approx(12.4733377622891).epsilon(1e-10));
  CHECK(std::abs(r.expansive.t_star) <= 1e-12);
  CHECK(r.expansive.multiplier == doctest::Approx(7.4).epsilon(1e-12));
  CHECK(r.expansive.cls == PointClass::Expansive);
  CHECK(r.conjugacy_residual <= 1e-9);
  CHECK(r.y0 > 0.0);
  CHECK(r.y0 == r.w.w.front());
  CHECK(r.cross_gap <= 1e-9);
  CHECK(r.w.converged);
  // computed once and frozen
  CHECK(r.w.w_inf == doctest::Approx(0.55488507862684833).epsilon(1e-9));
  CHECK(r.branch_condition);
  CHECK(r.bound_satisfied);
  CHECK_FALSE(r.omega_below_one);
  CHECK(r.nonvanishing == "empirical");
  CHECK(r.flags.empty());

  CHECK(r.pq_satisfied);
  REQUIRE(r.contractive.has_value());
  const double t00 = pi / 2 + std::acos(2 * pi / 6.4);
  const double mult = 1 - std::sqrt(6.4 * 6.4 - 4 * pi * pi);
  CHECK(std::abs(r.contractive->record.t_star - t00) <= 1e-10);
  CHECK(std::abs(r.contractive->record.multiplier - mult) <= 1e-10);
  CHECK(std::abs(r.contractive->record.multiplier) < 1.0);
  CHECK(std::abs(std::sin(r.contractive->record.t_star) - 2 * pi / 6.4) <= 1e-12);

  bool saw_analytic = false, saw_nonanalytic = false;
  for (const auto& p : r.orbit) {
    saw_analytic |= p.label == Label::Analytic;
    saw_nonanalytic |= p.label == Label::Nonanalytic;
  }
  CHECK(saw_analytic);
  CHECK(saw_nonanalytic);
}

TEST_CASE("coexistence config guards") {
  CoexistenceConfig c;
  c.m = 1;
  CHECK(code_of([&] { run_coexistence(c); }) == ErrorCode::ConfigInfeasible);
  c = {};
  c.lambda = 1.8;
  CHECK(code_of([&] { run_coexistence(c); }) == ErrorCode::LambdaTooSmall);

  // 2 pi m > 2 lambda + 1: still runs, flagged
  c = {};
  c.lambda = 4.0;
  c.m = 2;
  const auto r = run_coexistence(c);
  CHECK_FALSE(r.branch_condition);
  CHECK_FALSE(r.flags.empty());
  CHECK_FALSE(r.pq_satisfied);
  CHECK_FALSE(r.contractive.has_value());

  // no n satisfies the branch inequality at lambda = 13
  c = {};
  c.lambda = 13.0;
  c.n = 1;
  CHECK_FALSE(run_coexistence(c).pq_satisfied);
}

TEST_CASE("Omega bound holds across lambda") {
  for (double lambda : {3.0, 5.5, 7.4, 10.0, 13.0}) {
    CoexistenceConfig c;
    c.lambda = lambda;
    c.m = 2;
    c.G = 256;
    c.N = 120;
    const auto r = run_coexistence(c);
    CHECK(r.bound_satisfied);
    CHECK(r.cross_gap <= 1e-9);
  }
}
