#include "shiftlab/koenigs.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "shiftlab/error.hpp"

namespace shiftlab {

namespace {

// Jet of eta about t0 in the local coordinate s = t - t0, with zero constant term.
TruncatedSeries local_eta(const TruncatedSeries& eta_jet) {
  std::vector<double> e(eta_jet.coeffs().begin(), eta_jet.coeffs().end());
  e[0] = 0.0;
  return {0.0, std::move(e)};
}

TruncatedSeries local_sigma(const TruncatedSeries& sigma) {
  std::vector<double> c(sigma.coeffs().begin(), sigma.coeffs().end());
  c[0] = 0.0;
  return {0.0, std::move(c)};
}

}  // namespace

double conjugacy_residual(const TruncatedSeries& sigma, double lambda,
                          const TruncatedSeries& eta_jet) {
  const int order = std::min(sigma.order(), eta_jet.order());
  const TruncatedSeries s = local_sigma(sigma).truncated(order);
  const TruncatedSeries lhs = compose(local_eta(eta_jet).truncated(order), s);
  double residual = 0.0;
  double lambda_pow = 1.0;
  for (int n = 0; n <= order; ++n) {
    residual = std::max(residual, std::abs(lhs[n] - s[n] * lambda_pow));
    lambda_pow *= lambda;
  }
  return residual;
}

ConjugacyResult koenigs_series(const ShiftMap& map, double t0, int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "conjugacy order must be at least 1");
  if (std::abs(map.value(t0) - t0) > 1e-10 * std::max(1.0, std::abs(t0))) {
    throw Error(ErrorCode::NotFixedPoint, "t0 is not a fixed point of eta");
  }
  const double lambda = map.derivative(t0);
  if (lambda == 0.0) throw Error(ErrorCode::InvalidArgument, "zero multiplier has no conjugacy");
  if (classify_multiplier(lambda) == PointClass::Neutral) {
    throw Error(ErrorCode::NeutralMultiplier, "multiplier is in the neutral band |lambda| = 1");
  }

  if (map.is_affine()) {
    return {TruncatedSeries::identity(t0, order), lambda, 0.0};
  }

  const TruncatedSeries eta_jet = map.jet(t0, order);
  const auto e = eta_jet.coeffs();
  const double a = std::abs(lambda);
  const double divisor_floor = a * std::abs(a - 1.0);

  const std::size_t size = static_cast<std::size_t>(order) + 1;
  std::vector<double> c(size, 0.0);
  c[1] = 1.0;
  // powers[k][n] = coefficient n of S^k, S(s) = sum_{n>=1} c_n s^n.
  std::vector<std::vector<double>> powers(size, std::vector<double>(size, 0.0));
  powers[1][1] = 1.0;
  double lambda_pow = lambda;
  for (int n = 2; n <= order; ++n) {
    lambda_pow *= lambda;
    double rhs = 0.0;
    for (int k = 2; k <= n; ++k) {
      double p = 0.0;
      for (int j = 1; j <= n - k + 1; ++j) p += c[j] * powers[k - 1][n - j];
      powers[k][n] = p;
      rhs += e[k] * p;
    }
    const double divisor = lambda_pow - lambda;
    if (!(std::abs(divisor) >= divisor_floor * (1.0 - 1e-12))) {
      throw Error(ErrorCode::NeutralMultiplier, "small divisor lambda^n - lambda at n=" +
                                                    std::to_string(n));
    }
    c[n] = rhs / divisor;
    powers[1][n] = c[n];
  }
  c[0] = t0;
  TruncatedSeries sigma(t0, std::move(c));
  const double residual = conjugacy_residual(sigma, lambda, eta_jet);
  return {std::move(sigma), lambda, residual};
}

bool verify_conjugacy(const ConjugacyResult& result, const ShiftMap& map, double tol) {
  const double t0 = result.sigma.center();
  const TruncatedSeries eta_jet = map.jet(t0, result.sigma.order());
  return conjugacy_residual(result.sigma, result.lambda, eta_jet) <= tol;
}

TruncatedSeries zeta_iteration(double lambda, int order, int iters, double lambda_floor) {
  if (!(lambda >= lambda_floor)) {
    throw Error(ErrorCode::InvalidArgument, "zeta iteration needs lambda >= " +
                                                std::to_string(lambda_floor));
  }
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be at least 1");
  const double d = 1.0 / lambda;
  const int zo = order - 1;  // zeta carries one order less than sigma

  // g(u) = sin(u)/u - 1 = sum_{k>=1} (-1)^k u^{2k} / (2k+1)!
  std::vector<double> g(static_cast<std::size_t>(zo) + 1, 0.0);
  double fact = 1.0;  // (2k+1)!
  for (int k = 1; 2 * k <= zo; ++k) {
    fact *= (2.0 * k) * (2.0 * k + 1.0);
    g[2 * k] = ((k % 2) ? -1.0 : 1.0) / fact;
  }
  const TruncatedSeries g_jet(0.0, g);

  std::vector<double> zeta(static_cast<std::size_t>(zo) + 1, 0.0);
  double prev_diff = -1.0;
  for (int sweep = 0; sweep < iters; ++sweep) {
    std::vector<double> zd(zeta.size());
    double dp = 1.0;
    for (int n = 0; n <= zo; ++n) {
      zd[n] = zeta[n] * dp;
      dp *= d;
    }
    std::vector<double> one_plus = zd;
    one_plus[0] += 1.0;
    std::vector<double> u(zeta.size(), 0.0);
    for (int n = 1; n <= zo; ++n) u[n] = d * one_plus[n - 1];
    const TruncatedSeries gu = compose(g_jet, TruncatedSeries(0.0, u));
    const TruncatedSeries prod = mul(TruncatedSeries(0.0, one_plus), gu);

    std::vector<double> next(zeta.size());
    double diff = 0.0;
    for (int n = 0; n <= zo; ++n) {
      next[n] = zd[n] + (1.0 - d) * prod[n];
      diff = std::max(diff, std::abs(next[n] - zeta[n]));
    }
    next[0] = 0.0;
    zeta.swap(next);
    if (diff == 0.0) break;
    if (prev_diff > 1e-14 && diff > 0.9 * prev_diff) {
      throw Error(ErrorCode::NoContraction, "zeta sweep " + std::to_string(sweep) +
                                                " did not contract");
    }
    prev_diff = diff;
  }

  std::vector<double> sigma(static_cast<std::size_t>(order) + 1, 0.0);
  sigma[1] = 1.0;
  for (int n = 2; n <= order; ++n) sigma[n] = zeta[n - 1];
  return {0.0, std::move(sigma)};
}

}  // namespace shiftlab
