#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "shiftlab/pantograph.hpp"

namespace shiftlab {

/// Samples of a periodic function at t_j = j period / G, G a power of two >= 64.
struct PeriodicFunction {
  double period;
  std::vector<double> samples;

  int G() const noexcept { return static_cast<int>(samples.size()); }
  double node(int j) const noexcept { return period * j / static_cast<double>(samples.size()); }

  static PeriodicFunction sample(const std::function<double(double)>& f, double period, int G);

  /// Throws InvalidArgument for a bad grid size or period, NonFiniteCoefficient for bad samples.
  void validate() const;
};

/// r(t) = -(lambda - 1) sin t + 2 pi m with rho = 1.
struct SineFamilyParams {
  double lambda;
  int m;
};

/// kappa x(t) = integral over [t - r(t), t] of rho(s) x(s) ds.
struct IntegralOperatorSpec {
  PeriodicFunction r;    // delay, strictly positive
  PeriodicFunction rho;  // weight, strictly positive
  std::optional<SineFamilyParams> sine;  // closed form, when the spec came from sine_family

  static IntegralOperatorSpec sine_family(double lambda, int m, int G);

  /// Grids must match and r, rho must be strictly positive.
  void validate() const;
};

/// (Lx)(t_j): exact integral of the piecewise-linear interpolant of rho x, so the
/// trapezoid rule on interior cells plus a linear partial cell at the moving end.
PeriodicFunction apply_L(const IntegralOperatorSpec& spec, const PeriodicFunction& x);

struct EigenResult {
  double kappa;
  PeriodicFunction x;  // max sample 1, all samples positive
  double residual;     // sup |Lx - kappa x|
  double bound_lo;
  double bound_hi;
  int iterations;
};

/// Power iteration from x = 1 (or `initial`), x <- Lx / |Lx|_sup. Stops when the
/// relative change in kappa stays <= tol for 3 iterations in a row and the
/// residual is <= tol.
EigenResult power_iteration(const IntegralOperatorSpec& spec, double tol, int max_iter,
                            const std::optional<PeriodicFunction>& initial = std::nullopt);

struct BoundCheck {
  double lo;
  double hi;
  bool ok;
};

/// lo/hi are the extremes of the window integral of rho; ok when kappa lies
/// within [lo, hi] widened by 10 period / G^2.
BoundCheck verify_bounds(const IntegralOperatorSpec& spec, const EigenResult& result);

/// Local equation kappa x' = rho x - eta' (rho o eta) x(eta) at t0 with
/// eta(t) = t - r(t) + 2 pi m_branch, as jets of order N. Uses closed forms for
/// the sine family and spectral differentiation of the samples otherwise.
/// Throws BranchNotFixed unless |eta(t0) - t0| <= 1e-8.
LocalLinearDDE to_ode_coefficients(const IntegralOperatorSpec& spec, const EigenResult& result,
                                   int m_branch, double t0, int N);

/// Taylor jet of a sampled periodic function at t, from its discrete Fourier
/// series with modes below 1e-13 of the largest discarded.
TruncatedSeries spectral_jet(const PeriodicFunction& f, double t, int order);

/// CSV `t,x`.
void write_eigenfunction_csv(std::ostream& out, const PeriodicFunction& x);
PeriodicFunction read_eigenfunction_csv(std::istream& in, double period);

}  // namespace shiftlab
