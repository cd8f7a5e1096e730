#include "shiftlab/pantograph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "shiftlab/error.hpp"
#include "shiftlab/format.hpp"

namespace shiftlab {

namespace {

constexpr double kOverflowGuard = 1e300;

bool close_centers(double a, double b) {
  return std::abs(a - b) <= 1e-14 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

TruncatedSeries padded(double center, double value, int order) {
  return TruncatedSeries::constant(center, value, order);
}

double tail_gap_of(const std::vector<double>& w) {
  const std::size_t N = w.size() - 1;
  if (N == 0) return 0.0;
  const std::size_t start = N - std::max<std::size_t>(1, N / 4);
  double gap = 0.0;
  for (std::size_t n = start; n < N; ++n) gap = std::max(gap, std::abs(w[n + 1] - w[n]));
  return gap;
}

// Map a jet y of the local coordinate s back to x about t0 through x(t) = y(sigma^{-1}(t) - t0).
TruncatedSeries to_original(const TruncatedSeries& y, const TruncatedSeries& sigma) {
  const int order = std::min(y.order(), sigma.order());
  std::vector<double> inv = [&] {
    const TruncatedSeries r = revert(sigma.truncated(std::max(order, 1)));
    return std::vector<double>(r.coeffs().begin(), r.coeffs().end());
  }();
  const double t0 = sigma.center();
  inv[0] -= t0;
  const TruncatedSeries inner(t0, std::move(inv));
  return compose(y.truncated(order), inner.truncated(order));
}

}  // namespace

void LocalLinearDDE::validate() const {
  if (!close_centers(a.center(), t0) || !close_centers(b.center(), t0) ||
      !close_centers(h.center(), t0)) {
    throw Error(ErrorCode::CenterMismatch, "coefficient series must be centered at t0");
  }
  if (std::abs(map.value(t0) - t0) > 1e-10 * std::max(1.0, std::abs(t0))) {
    throw Error(ErrorCode::NotFixedPoint, "t0 is not a fixed point of eta");
  }
}

PantographForm PantographForm::constant(double a0, double b0, double g0, double lambda,
                                        int order) {
  return {padded(0.0, a0, order), padded(0.0, b0, order), padded(0.0, g0, order), lambda};
}

int PantographForm::order() const noexcept {
  return std::min({alpha.order(), beta.order(), gamma.order()});
}

PantographForm to_pantograph(const LocalLinearDDE& dde, const ConjugacyResult& conj, int order) {
  dde.validate();
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "order must be nonnegative");
  if (conj.sigma.order() < order + 1) {
    throw Error(ErrorCode::JetTooShort, "conjugacy of order " +
                                            std::to_string(conj.sigma.order()) +
                                            " cannot give coefficients of order " +
                                            std::to_string(order));
  }
  if (dde.a.order() < order || dde.b.order() < order || dde.h.order() < order) {
    throw Error(ErrorCode::JetTooShort, "coefficient jets are shorter than the requested order");
  }
  const TruncatedSeries sigma = conj.sigma.truncated(order + 1);
  const TruncatedSeries dsigma = differentiate(sigma);
  const auto pull = [&](const TruncatedSeries& c) {
    return mul(dsigma, compose(c.truncated(order), sigma.truncated(order)))
        .truncated(order)
        .recentered(0.0);
  };
  return {pull(dde.a), pull(dde.b), pull(dde.h), conj.lambda};
}

TruncatedSeries taylor_coefficients(const PantographForm& form, double y0, int N) {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be nonnegative");
  if (N > 0 && form.order() < N - 1) {
    throw Error(ErrorCode::JetTooShort, "pantograph coefficients shorter than N - 1");
  }
  const auto al = form.alpha.coeffs();
  const auto be = form.beta.coeffs();
  const auto ga = form.gamma.coeffs();
  std::vector<double> y(static_cast<std::size_t>(N) + 1, 0.0);
  // ly[k] = lambda^k y_k, kept separately so lambda^k alone never overflows.
  std::vector<double> ly(y.size(), 0.0);
  y[0] = y0;
  ly[0] = y0;
  for (int n = 0; n < N; ++n) {
    double s = ga[n];
    for (int k = 0; k <= n; ++k) s += al[n - k] * y[k] + be[n - k] * ly[k];
    const double next = s / (n + 1);
    if (!std::isfinite(next) || std::abs(next) > kOverflowGuard) {
      throw Error(ErrorCode::CoefficientOverflow,
                  "|y_" + std::to_string(n + 1) + "| exceeds 1e300");
    }
    y[n + 1] = next;
    // lambda^{n+1} y_{n+1} = lambda^{n+1} * next; build from the magnitude in logs.
    if (next == 0.0) {
      ly[n + 1] = 0.0;
    } else {
      const double lg = (n + 1) * std::log(std::abs(form.lambda)) + std::log(std::abs(next));
      if (lg > std::log(kOverflowGuard)) {
        throw Error(ErrorCode::CoefficientOverflow,
                    "lambda^n y_n exceeds 1e300 at n=" + std::to_string(n + 1));
      }
      const bool neg = (next < 0) != (form.lambda < 0 && (n + 1) % 2 == 1);
      ly[n + 1] = neg ? -std::exp(lg) : std::exp(lg);
    }
  }
  return {0.0, std::move(y)};
}

WDiagnostics w_sequence(const PantographForm& form, double y0, int N) {
  const double lambda = form.lambda;
  if (!(std::abs(lambda) > 1.0)) {
    throw Error(ErrorCode::NotExpansive, "w recursion needs |lambda| > 1");
  }
  const double b0 = form.beta[0];
  if (!(std::abs(b0) >= 1e-12)) {
    throw Error(ErrorCode::DegenerateLeadingCoefficient, "|beta_0| < 1e-12");
  }
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be nonnegative");
  if (N > 0 && form.order() < N - 1) {
    throw Error(ErrorCode::JetTooShort, "pantograph coefficients shorter than N - 1");
  }
  const auto al = form.alpha.coeffs();
  const auto be = form.beta.coeffs();
  const auto ga = form.gamma.coeffs();

  const double log_l = std::log(std::abs(lambda));
  const double log_b = std::log(std::abs(b0));
  const bool neg_l = lambda < 0;
  const bool neg_b = b0 < 0;

  // f_j = theta_j / theta_{j-1} = j / (lambda^j beta_0), as (log|f_j|, sign).
  std::vector<double> log_f(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<char> neg_f(log_f.size(), 0);
  for (int j = 1; j <= N; ++j) {
    log_f[j] = std::log(static_cast<double>(j)) - j * log_l - log_b;
    neg_f[j] = static_cast<char>(neg_b != (neg_l && j % 2 == 1));
  }

  std::vector<double> w(static_cast<std::size_t>(N) + 1, 0.0);
  w[0] = y0;
  double log_theta = 0.0;  // theta_n, theta_0 = 1
  bool neg_theta = false;
  for (int n = 0; n < N; ++n) {
    if (n > 0) {
      log_theta += log_f[n];
      neg_theta = neg_theta != static_cast<bool>(neg_f[n]);
    }
    // lambda^{-n} alpha_0 / beta_0
    const double inv_ln = std::exp(-n * log_l) * ((neg_l && n % 2 == 1) ? -1.0 : 1.0);
    double next = (1.0 + al[0] / b0 * inv_ln) * w[n];

    double log_r = 0.0;  // log |theta_n / theta_k|
    bool neg_r = false;
    double sum = 0.0;
    for (int k = n - 1; k >= 0; --k) {
      log_r += log_f[k + 1];
      neg_r = neg_r != static_cast<bool>(neg_f[k + 1]);
      const double bk = be[n - k];
      const double ak = al[n - k];
      if ((bk == 0.0 && ak == 0.0) || w[k] == 0.0) continue;
      const double sgn = neg_r ? -1.0 : 1.0;
      double c = bk * sgn * std::exp(log_r);
      if (ak != 0.0) {
        const double lk_sign = (neg_l && k % 2 == 1) ? -1.0 : 1.0;
        c += ak * sgn * lk_sign * std::exp(log_r - k * log_l);
      }
      sum += c * w[k];
    }
    next += sum / b0;
    if (ga[n] != 0.0) {
      next += (neg_theta ? -1.0 : 1.0) * std::exp(log_theta) * ga[n] / b0;
    }
    w[n + 1] = next;
  }

  WDiagnostics d;
  d.w_inf = w.back();
  d.tail_gap = tail_gap_of(w);
  d.converged = d.tail_gap <= 1e-12 * std::max(1.0, std::abs(d.w_inf));
  d.w = std::move(w);
  return d;
}

std::vector<double> closed_form_oracle_simple(double a0, double b0, double lambda, double x0,
                                              int N) {
  if (b0 == 0.0) throw Error(ErrorCode::DegenerateLeadingCoefficient, "b0 must be nonzero");
  if (!(std::abs(lambda) > 1.0)) throw Error(ErrorCode::NotExpansive, "needs |lambda| > 1");
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be nonnegative");
  std::vector<double> w(static_cast<std::size_t>(N) + 1);
  w[0] = x0;
  double lk = 1.0;
  for (int k = 0; k < N; ++k) {
    w[k + 1] = w[k] * (1.0 + a0 / (lk * b0));
    lk *= lambda;
  }
  return w;
}

WInfinity w_infinity_search(const PantographForm& form, double y0, double tol, int N_max) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  const int cap = std::min(N_max, form.order() + 1);
  if (cap < 1) throw Error(ErrorCode::InvalidArgument, "N_max must be at least 1");
  int N = std::min(64, cap);
  while (true) {
    WDiagnostics d = w_sequence(form, y0, N);
    const bool ok = d.tail_gap <= tol * std::max(1.0, std::abs(d.w_inf));
    if (ok || N >= cap) {
      // ratio of the last two increments, as a convergence-rate diagnostic
      double ratio = std::numeric_limits<double>::quiet_NaN();
      if (N >= 2) {
        const double d1 = std::abs(d.w[N] - d.w[N - 1]);
        const double d0 = std::abs(d.w[N - 1] - d.w[N - 2]);
        if (d0 > 0.0) ratio = d1 / d0;
      }
      WInfinity out{d.w_inf, ok, N, d.tail_gap, ratio, {}};
      out.diagnostics = std::move(d);
      return out;
    }
    N = std::min(2 * N, cap);
  }
}

WInfinity w_infinity(const PantographForm& form, double y0, double tol, int N_max) {
  WInfinity r = w_infinity_search(form, y0, tol, N_max);
  if (!r.converged) {
    throw Error(ErrorCode::NonConvergence,
                "w sequence not settled at N=" + std::to_string(r.N_used) +
                    " (tail_gap=" + format_double(r.tail_gap) + ")");
  }
  return r;
}

Reconstruction reconstruct_analytic(const PantographForm& form, double y0, int N) {
  TruncatedSeries y = taylor_coefficients(form, y0, N);
  const auto c = y.coeffs();

  int last_nonzero = -1;
  for (int n = 0; n <= N; ++n) {
    if (c[n] != 0.0) last_nonzero = n;
  }

  // Least squares log|y_n| = log A + n log nu over nonzero coefficients.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = 0; n <= N; ++n) {
    if (c[n] == 0.0) continue;
    const double ly = std::log(std::abs(c[n]));
    sx += n;
    sy += ly;
    sxx += static_cast<double>(n) * n;
    sxy += n * ly;
    ++m;
  }
  GeometricFit fit{std::abs(y0), 0.0};
  double residual = 0.0;
  if (m >= 2) {
    const double den = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / den;
    const double icpt = (sy - slope * sx) / m;
    fit = {std::exp(icpt), std::exp(slope)};
    double ss = 0.0;
    for (int n = 0; n <= N; ++n) {
      if (c[n] == 0.0) continue;
      const double r = std::log(std::abs(c[n])) - (icpt + slope * n);
      ss += r * r;
    }
    residual = std::sqrt(ss / m);
  } else if (m == 1) {
    fit = {std::abs(c[last_nonzero]), 0.0};
  }

  const bool terminates = last_nonzero <= N / 2;
  double radius = std::numeric_limits<double>::infinity();
  bool plausible = false;
  if (terminates) {
    plausible = true;
  } else {
    if (N >= 8) radius = radius_estimate(y, std::max(8, N / 4)).radius_estimate;
    // Root-test sequence |y_n|^{1/n}: its late maximum must not outgrow its mid maximum.
    const auto root_max = [&](int from, int to) {
      double r = 0.0;
      for (int n = std::max(from, 1); n <= to; ++n) {
        if (c[n] != 0.0) r = std::max(r, std::pow(std::abs(c[n]), 1.0 / n));
      }
      return r;
    };
    const double mid = root_max(N / 4 + 1, N / 2);
    const double late = root_max(3 * N / 4 + 1, N);
    plausible = radius > 0.0 && late <= 1.25 * mid + 1e-300;
  }
  return {std::move(y), fit, residual, radius, plausible};
}

std::string_view to_string(VerdictClass v) noexcept {
  switch (v) {
    case VerdictClass::Analytic:
      return "Analytic";
    case VerdictClass::Nonanalytic:
      return "Nonanalytic";
    case VerdictClass::AnalyticCandidate:
      return "AnalyticCandidate";
    case VerdictClass::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

Verdict classify_point(const LocalLinearDDE& dde, double y0, const ClassifyConfig& config) {
  dde.validate();
  const double lambda = dde.map.derivative(dde.t0);
  const PointClass pc = classify_multiplier(lambda);
  if (pc == PointClass::Neutral) {
    throw Error(ErrorCode::NeutralMultiplier, "multiplier is in the neutral band");
  }
  const int coeff_order = std::min({dde.a.order(), dde.b.order(), dde.h.order()});
  const double scale = std::max(1.0, std::abs(y0));

  Verdict v{VerdictClass::Inconclusive, lambda, pc, {}, {}, {}, {}, {}};

  if (pc == PointClass::Contractive) {
    const int order = std::min(config.series_order, coeff_order);
    const ConjugacyResult conj = koenigs_series(dde.map, dde.t0, order + 1);
    const PantographForm form = to_pantograph(dde, conj, order);
    const TruncatedSeries y = taylor_coefficients(form, y0, order);
    v.cls = VerdictClass::Analytic;
    v.series = to_original(y, conj.sigma);
    v.note = "contractive fixed point: the solution through y0 is analytic";
    return v;
  }

  // Expansive. Affine maps have the identity conjugacy at any order.
  const int conj_order =
      dde.map.is_affine() ? coeff_order + 1 : std::min(config.jet_order, coeff_order + 1);
  const ConjugacyResult conj = koenigs_series(dde.map, dde.t0, conj_order);
  const PantographForm form = to_pantograph(dde, conj, conj_order - 1);
  const WInfinity wi = w_infinity_search(form, y0, config.w_tol, config.N_max);
  v.w_inf = wi.w_inf;
  v.tail_gap = wi.tail_gap;
  v.N_used = wi.N_used;
  if (!wi.converged) {
    v.note = "w sequence did not settle within N_max";
    return v;
  }
  if (std::abs(wi.w_inf) > config.tol_nonzero * scale) {
    v.cls = VerdictClass::Nonanalytic;
    v.note = "w_inf is nonzero: no analytic solution through y0";
  } else if (std::abs(wi.w_inf) <= config.tol_zero * scale) {
    v.cls = VerdictClass::AnalyticCandidate;
    const int order = std::min(config.series_order, form.order() + 1);
    const Reconstruction rec = reconstruct_analytic(form, y0, order);
    v.series = to_original(rec.series, conj.sigma);
    v.note =
        "w_inf vanishes; an analytic solution is possible, and non-analytic smooth solutions "
        "with the same Taylor jet coexist";
  } else {
    v.note = "w_inf lies between the zero and nonzero thresholds";
  }
  return v;
}

void write_w_csv(std::ostream& out, const WDiagnostics& diag) {
  out << "n,w_n,delta_n\n";
  for (std::size_t n = 0; n < diag.w.size(); ++n) {
    const double delta = n == 0 ? 0.0 : diag.w[n] - diag.w[n - 1];
    out << n << ',' << format_double(diag.w[n]) << ',' << format_double(delta) << '\n';
  }
}

std::vector<double> read_w_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,w_n,delta_n", 0) != 0) {
    throw Error(ErrorCode::ParseError, "missing header n,w_n,delta_n");
  }
  std::vector<double> w;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw Error(ErrorCode::ParseError, "malformed row: " + line);
    }
    const std::string field = line.substr(c1 + 1, c2 - c1 - 1);
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end == field.c_str()) throw Error(ErrorCode::ParseError, "bad number: " + field);
    w.push_back(value);
  }
  return w;
}

}  // namespace shiftlab
