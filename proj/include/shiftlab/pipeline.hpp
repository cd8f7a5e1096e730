#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shiftlab/koenigs.hpp"
#include "shiftlab/kreigen.hpp"
#include "shiftlab/pantograph.hpp"
#include "shiftlab/shiftmap.hpp"

namespace shiftlab {

/// Periodic delay r(t) = -(lambda - 1) sin t + 2 pi m with rho = 1; n picks the
/// branch searched for a contractive fixed point.
struct CoexistenceConfig {
  double lambda = 7.4;
  int m = 2;
  int n = 1;
  int G = 1024;
  int N = 200;  // w-sequence length; the conjugacy is built to the same order
  double eigen_tol = 1e-12;
  int eigen_max_iter = 20000;
  int orbit_steps = 4;

  /// ConfigInfeasible unless 1 < lambda < 2 pi m + 1; LambdaTooSmall unless lambda > 2.
  void validate() const;
};

struct ContractiveRecord {
  FixedPointRecord record;
  double t_closed_form;           // pi/2 + arccos(2 pi n / (lambda - 1))
  double multiplier_closed_form;  // 1 - sqrt((lambda - 1)^2 - (2 pi n)^2)
};

struct CoexistenceReport {
  CoexistenceConfig config;
  EigenResult eigen;
  double kappa_lo;  // 2 pi m - lambda + 1
  double kappa_hi;  // 2 pi m + lambda - 1
  bool kappa_in_bounds;
  FixedPointRecord expansive;
  double conjugacy_residual;
  double y0;  // eigenfunction at 0, sup norm 1
  WDiagnostics w;
  double cross_gap;  // max relative gap between the general and the sine-family recursion
  double omega;
  bool bound_satisfied;  // |w_inf - w_0| <= omega |w_0| + 1e-9
  bool omega_below_one;
  bool branch_condition;  // 2 pi m <= 2 lambda + 1; the report is flagged when false
  bool pq_satisfied;
  std::optional<ContractiveRecord> contractive;
  std::vector<LabeledPoint> orbit;
  std::string nonvanishing;  // "bound" when omega < 1, else "empirical"
  std::vector<std::string> flags;
};

/// Eigenfunction, Koenigs conjugacy at the expansive point 0, w-sequence and the
/// Omega bound, then the contractive point on branch n when it exists.
CoexistenceReport run_coexistence(const CoexistenceConfig& config);

/// w_{n+1} = (1 - lambda^{-(n+1)}) (w_n + sum_{k<n} (xi_n / xi_k) (n-k+1) sigma_{n-k+1} w_k)
/// with xi_k = (-1)^k kappa^k k! / lambda^{k(k+1)/2} carried in log form.
/// Needs sigma through order N.
WDiagnostics w_sequence_sine(double kappa, const ConjugacyResult& sigma, double lambda, double y0,
                             int N);

/// 1 + 18 sum_{j>=1} (j+1)/2^j.
double omega_constant();

/// (sum H_n)(prod (1 + H_k)) with H_0 = 1/lambda and H_n = (2/lambda)^n K.
/// Throws LambdaTooSmall for lambda <= 2.
double omega_bound(double lambda);

/// The lambda where omega_bound crosses 1, by bisection.
double omega_threshold(double rel_tol = 1e-13);

}  // namespace shiftlab
