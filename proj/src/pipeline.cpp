#include "shiftlab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shiftlab/error.hpp"
#include "shiftlab/format.hpp"

namespace shiftlab {

namespace {

using std::numbers::pi;

double tail_gap(const std::vector<double>& w) {
  const std::size_t N = w.size() - 1;
  if (N == 0) return 0.0;
  const std::size_t start = N - std::max<std::size_t>(1, N / 4);
  double gap = 0.0;
  for (std::size_t n = start; n < N; ++n) gap = std::max(gap, std::abs(w[n + 1] - w[n]));
  return gap;
}

double relative_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    const double s = std::max(std::abs(a[i]), std::abs(b[i]));
    if (s > 0.0) worst = std::max(worst, std::abs(a[i] - b[i]) / s);
  }
  return worst;
}

}  // namespace

void CoexistenceConfig::validate() const {
  if (!(lambda > 1.0 && lambda < 2 * pi * m + 1)) {
    throw Error(ErrorCode::ConfigInfeasible,
                "need 1 < lambda < 2 pi m + 1, got lambda = " + format_double(lambda) +
                    ", m = " + std::to_string(m));
  }
  if (!(lambda > 2.0)) throw Error(ErrorCode::LambdaTooSmall, "the Omega bound needs lambda > 2");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  if (orbit_steps < 0) throw Error(ErrorCode::InvalidArgument, "orbit_steps must be nonnegative");
}

double omega_constant() {
  // summed smallest first
  double s = 0.0;
  for (int j = 199; j >= 1; --j) s += (j + 1) * std::ldexp(1.0, -j);
  return 1.0 + 18.0 * s;
}

double omega_bound(double lambda) {
  if (!(lambda > 2.0)) {
    throw Error(ErrorCode::LambdaTooSmall, "Omega diverges for lambda <= 2");
  }
  const double K = omega_constant();
  const double q = 2.0 / lambda;
  const double sum = 1.0 / lambda + K * q / (1.0 - q);
  double log_prod = std::log1p(1.0 / lambda);
  double h = K;
  for (int k = 1; k < 100000; ++k) {
    h *= q;
    const double term = std::log1p(h);
    log_prod += term;
    if (term < 1e-18 * log_prod) break;
  }
  return sum * std::exp(log_prod);
}

double omega_threshold(double rel_tol) {
  double lo = 2.0, hi = 4.0;
  while (omega_bound(hi) >= 1.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (omega_bound(mid) >= 1.0 ? lo : hi) = mid;
  }
  return hi;
}

WDiagnostics w_sequence_sine(double kappa, const ConjugacyResult& conj, double lambda, double y0,
                             int N) {
  if (!(std::abs(lambda) > 1.0)) throw Error(ErrorCode::NotExpansive, "needs |lambda| > 1");
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be nonnegative");
  if (conj.sigma.order() < N) throw Error(ErrorCode::JetTooShort, "sigma shorter than N");
  const auto sigma = conj.sigma.coeffs();
  const double log_l = std::log(std::abs(lambda));
  const double log_k = std::log(kappa);

  // xi_j / xi_{j-1} = -kappa j / lambda^j
  std::vector<double> log_f(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<char> neg_f(log_f.size(), 0);
  for (int j = 1; j <= N; ++j) {
    log_f[j] = log_k + std::log(static_cast<double>(j)) - j * log_l;
    neg_f[j] = static_cast<char>(!(lambda < 0 && j % 2 == 1));
  }

  std::vector<double> w(static_cast<std::size_t>(N) + 1, 0.0);
  w[0] = y0;
  double lpow = 1.0;
  for (int n = 0; n < N; ++n) {
    lpow *= lambda;
    double sum = w[n];
    double log_r = 0.0;
    bool neg_r = false;
    for (int k = n - 1; k >= 0; --k) {
      log_r += log_f[k + 1];
      neg_r = neg_r != static_cast<bool>(neg_f[k + 1]);
      const double s = sigma[n - k + 1];
      if (s == 0.0 || w[k] == 0.0) continue;
      sum += (neg_r ? -1.0 : 1.0) * std::exp(log_r) * (n - k + 1) * s * w[k];
    }
    w[n + 1] = (1.0 - 1.0 / lpow) * sum;
  }
  WDiagnostics d;
  d.w_inf = w.back();
  d.tail_gap = tail_gap(w);
  d.converged = d.tail_gap <= 1e-12 * std::max(1.0, std::abs(d.w_inf));
  d.w = std::move(w);
  return d;
}

CoexistenceReport run_coexistence(const CoexistenceConfig& config) {
  config.validate();
  const double lambda = config.lambda;
  CoexistenceReport rep{};
  rep.config = config;

  const IntegralOperatorSpec spec = IntegralOperatorSpec::sine_family(lambda, config.m, config.G);
  rep.eigen = power_iteration(spec, config.eigen_tol, config.eigen_max_iter);
  rep.kappa_lo = 2 * pi * config.m - lambda + 1;
  rep.kappa_hi = 2 * pi * config.m + lambda - 1;
  const double slack = 10.0 * spec.r.period / (static_cast<double>(config.G) * config.G);
  rep.kappa_in_bounds =
      rep.kappa_lo - slack <= rep.eigen.kappa && rep.eigen.kappa <= rep.kappa_hi + slack;

  rep.branch_condition = 2 * pi * config.m <= 2 * lambda + 1;
  if (!rep.branch_condition) {
    rep.flags.push_back("ConfigInfeasible: 2 pi m > 2 lambda + 1, the nonvanishing argument does not apply");
  }

  // Expansive point t0 = 0 on the branch of the delay itself.
  const ShiftMap eta(SineShift{lambda, 0.0});
  {
    const auto roots = find_fixed_points(eta, -1.0, 1.0, 1, 1e-14);
    const auto it = std::min_element(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
      return std::abs(a.t_star) < std::abs(b.t_star);
    });
    if (it == roots.end() || std::abs(it->t_star) > 1e-10) {
      throw Error(ErrorCode::NotFixedPoint, "no fixed point at 0");
    }
    rep.expansive = *it;
  }

  const ConjugacyResult conj = koenigs_series(eta, 0.0, config.N);
  rep.conjugacy_residual = conj.residual;
  const LocalLinearDDE dde = to_ode_coefficients(spec, rep.eigen, config.m, 0.0, config.N);
  const PantographForm form = to_pantograph(dde, conj, config.N - 1);
  rep.y0 = rep.eigen.x.samples.front();
  rep.w = w_sequence(form, rep.y0, config.N);
  const WDiagnostics crc = w_sequence_sine(rep.eigen.kappa, conj, lambda, rep.y0, config.N);
  rep.cross_gap = relative_gap(rep.w.w, crc.w);

  rep.omega = omega_bound(lambda);
  const double w0 = rep.w.w.front();
  rep.bound_satisfied = std::abs(rep.w.w_inf - w0) <= rep.omega * std::abs(w0) + 1e-9;
  rep.omega_below_one = rep.omega < 1.0;
  rep.nonvanishing = rep.omega_below_one ? "bound" : "empirical";
  if (!rep.bound_satisfied) rep.flags.push_back("w sequence violates the Omega bound");
  if (!rep.w.converged) rep.flags.push_back("w sequence tail has not settled");

  const double c = 2 * pi * config.n;
  const double lm1 = lambda - 1.0;
  rep.pq_satisfied = lm1 * lm1 - 4.0 >= 0.0 && std::sqrt(lm1 * lm1 - 4.0) < c && c < lm1;
  std::vector<Seed> seeds{{0.0, Label::Nonanalytic}};
  if (rep.pq_satisfied) {
    const ShiftMap branch(SineShift{lambda, -c});
    const double t_cf = pi / 2 + std::acos(c / lm1);
    const double mult_cf = 1.0 - std::sqrt(lm1 * lm1 - c * c);
    const auto roots = find_fixed_points(branch, pi / 2, pi, 1, 1e-14);
    const auto it = std::min_element(roots.begin(), roots.end(), [t_cf](const auto& a, const auto& b) {
      return std::abs(a.t_star - t_cf) < std::abs(b.t_star - t_cf);
    });
    if (it == roots.end()) throw Error(ErrorCode::NotFixedPoint, "no fixed point on branch n");
    rep.contractive = ContractiveRecord{*it, t_cf, mult_cf};
    if (it->cls != PointClass::Contractive) {
      rep.flags.push_back("fixed point on branch n is not contractive");
    } else {
      seeds.push_back({it->t_star, Label::Analytic});
    }
  }
  rep.orbit = propagate_classification(eta, seeds, config.orbit_steps, false);
  return rep;
}

}  // namespace shiftlab
