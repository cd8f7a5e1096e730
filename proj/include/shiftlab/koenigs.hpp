#pragma once

#include "shiftlab/series.hpp"
#include "shiftlab/shiftmap.hpp"

namespace shiftlab {

/// Local linearizing change of variables sigma with sigma(t0) = t0,
/// sigma'(t0) = 1 and eta(sigma(t)) = sigma(t0 + lambda (t - t0)).
struct ConjugacyResult {
  TruncatedSeries sigma;  // centered at t0
  double lambda;
  double residual;  // max |coefficient| of eta o sigma - sigma o (linear map)
};

/// Coefficient matching: at order n, (lambda^n - lambda) sigma_n equals the
/// order-n coefficient of eta o sigma built from sigma_2 .. sigma_{n-1}.
/// Works for any multiplier with |lambda| != 0, 1.
ConjugacyResult koenigs_series(const ShiftMap& map, double t0, int order);

/// Max coefficient of eta o sigma - sigma o (t0 + lambda (t - t0)) through the
/// order of sigma, with `eta_jet` the jet of eta at t0.
double conjugacy_residual(const TruncatedSeries& sigma, double lambda,
                          const TruncatedSeries& eta_jet);

bool verify_conjugacy(const ConjugacyResult& result, const ShiftMap& map, double tol);

inline constexpr double kZetaLambdaFloor = 10.0;

/// Independent route for the sine family eta(t) = t + (lambda - 1) sin t at 0.
/// Writes sigma(t) = t + t zeta(t) and iterates
///   zeta(t) = zeta(d t) + (1 - d)(1 + zeta(d t)) g(d t + d t zeta(d t)),
/// d = 1/lambda, g(u) = sin(u)/u - 1, on jets starting from zeta = 0.
/// Throws NoContraction when a sweep fails to shrink the update by 0.9.
TruncatedSeries zeta_iteration(double lambda, int order, int iters,
                               double lambda_floor = kZetaLambdaFloor);

}  // namespace shiftlab
