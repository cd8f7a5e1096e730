#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shiftlab/koenigs.hpp"
#include "shiftlab/series.hpp"
#include "shiftlab/shiftmap.hpp"

namespace shiftlab {

/// x'(t) = a(t) x(t) + b(t) x(eta(t)) + h(t) near a fixed point t0 of eta.
struct LocalLinearDDE {
  TruncatedSeries a;
  TruncatedSeries b;
  TruncatedSeries h;
  ShiftMap map;
  double t0;

  /// Throws CenterMismatch / NotFixedPoint when the invariants fail.
  void validate() const;
};

/// y'(s) = alpha(s) y(s) + beta(s) y(lambda s) + gamma(s), jets centered at 0.
struct PantographForm {
  TruncatedSeries alpha;
  TruncatedSeries beta;
  TruncatedSeries gamma;
  double lambda;

  /// Constant coefficients padded with exact zeros through `order`.
  static PantographForm constant(double a0, double b0, double g0, double lambda, int order);

  int order() const noexcept;
};

/// Rescaled Taylor coefficients w_n = n! y_n / (lambda^{n(n-1)/2} beta_0^n).
struct WDiagnostics {
  std::vector<double> w;  // w_0 .. w_N
  double w_inf;           // last iterate
  double tail_gap;        // max |w_{n+1} - w_n| over the last quarter
  bool converged;         // tail_gap <= 1e-12 max(1, |w_N|)
};

/// Pulls the equation back through sigma: alpha = sigma' (a o sigma), and the
/// same for beta and gamma, truncated at `order` and recentered at 0.
/// Needs sigma to order >= order + 1 and a, b, h to order >= order.
PantographForm to_pantograph(const LocalLinearDDE& dde, const ConjugacyResult& conj, int order);

/// Formal solution: (n+1) y_{n+1} = sum alpha_{n-k} y_k + sum beta_{n-k} lambda^k y_k + gamma_n.
/// Throws CoefficientOverflow once |y_n| > 1e300.
TruncatedSeries taylor_coefficients(const PantographForm& form, double y0, int N);

/// The w recursion with theta_k = k! / (lambda^{k(k+1)/2} beta_0^k) ratios
/// carried as sign and log-magnitude. Needs |lambda| > 1 and |beta_0| >= 1e-12.
WDiagnostics w_sequence(const PantographForm& form, double y0, int N);

/// w_n = x0 prod_{k<n} (1 + a0 / (lambda^k b0)) for x' = a0 x + b0 x(lambda t).
std::vector<double> closed_form_oracle_simple(double a0, double b0, double lambda, double x0,
                                              int N);

struct WInfinity {
  double w_inf;
  bool converged;
  int N_used;
  double tail_gap;
  double tail_ratio;  // geometric ratio of late increments, diagnostic only
  WDiagnostics diagnostics;
};

/// Doubles N from 64 until tail_gap <= tol max(1, |w_N|). Throws NonConvergence
/// when N_max is reached first.
WInfinity w_infinity(const PantographForm& form, double y0, double tol, int N_max);

/// Same search without throwing; `converged` reports the outcome.
WInfinity w_infinity_search(const PantographForm& form, double y0, double tol, int N_max);

struct GeometricFit {
  double A;
  double nu;
};

struct Reconstruction {
  TruncatedSeries series;
  GeometricFit geometric_fit;
  double fit_residual;  // rms of the log-linear fit
  double radius;
  bool plausible;
};

/// Formal series plus evidence for a bound |y_n| <= A nu^n. A series is
/// plausible when it terminates or when its root-test sequence does not grow
/// from the second quarter to the last quarter of the indices.
Reconstruction reconstruct_analytic(const PantographForm& form, double y0, int N);

enum class VerdictClass { Analytic, Nonanalytic, AnalyticCandidate, Inconclusive };

std::string_view to_string(VerdictClass v) noexcept;

struct ClassifyConfig {
  int jet_order = 64;  // conjugacy order for non-affine maps
  int N_max = 512;
  double w_tol = 1e-12;
  double tol_zero = 1e-8;      // relative to max(1, |y0|)
  double tol_nonzero = 1e-6;   // relative to max(1, |y0|)
  int series_order = 32;
};

struct Verdict {
  VerdictClass cls;
  double multiplier;
  PointClass point_class;
  std::optional<double> w_inf;
  std::optional<double> tail_gap;
  std::optional<int> N_used;
  std::optional<TruncatedSeries> series;  // jet of x about t0, when available
  std::string note;
};

Verdict classify_point(const LocalLinearDDE& dde, double y0, const ClassifyConfig& config = {});

/// CSV `n,w_n,delta_n` with delta_n = w_n - w_{n-1} (0 for n = 0).
void write_w_csv(std::ostream& out, const WDiagnostics& diag);
std::vector<double> read_w_csv(std::istream& in);

}  // namespace shiftlab
