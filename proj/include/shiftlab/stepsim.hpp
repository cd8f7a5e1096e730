#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "shiftlab/pantograph.hpp"

namespace shiftlab {

/// Values at uniform nodes a = t_0 < ... < t_{n-1} = b.
struct SampledInterval {
  double a;
  double b;
  std::vector<double> y;

  double node(std::size_t i) const noexcept {
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(y.size() - 1);
  }
  /// Cubic Lagrange interpolation through the four nearest nodes.
  double at(double t) const noexcept;
};

/// phi on I- = [-tau, -tau/|lambda|] and I+ = [tau/|lambda|, tau].
struct InitialData {
  double tau;
  SampledInterval phi_minus;
  SampledInterval phi_plus;

  static InitialData from_functions(double tau, double lambda,
                                    const std::function<double(double)>& minus,
                                    const std::function<double(double)>& plus, int nodes = 65);
  static InitialData constant(double tau, double lambda, double c_minus, double c_plus,
                              int nodes = 65);

  /// Throws InvalidArgument unless the grids cover I-/+ exactly with >= 64 nodes.
  void validate(double lambda) const;
  double sup_norm() const noexcept;
};

/// Pointwise a phi1 + c phi2 on matching grids.
InitialData combine(double a, const InitialData& phi1, double c, const InitialData& phi2);

struct StepSolution {
  double tau;
  double lambda;
  // Index 0 holds the initial data; layer k >= 1 covers tau/|lambda|^{k+1} <= |t| <= tau/|lambda|^k.
  std::vector<SampledInterval> minus;
  std::vector<SampledInterval> plus;
  double lambda_minus;
  double lambda_plus;
  double sup_norm_phi;
  double richardson_gap;  // disagreement between the last two extrapolations
};

inline constexpr int kDefaultDepth = 40;
inline constexpr int kDefaultStepsPerLayer = 256;

/// Method of steps toward 0 from both sides: on layer k, y(lambda t) is read
/// from layer k-1 (the opposite side when lambda < 0) and the linear ODE is
/// advanced by classical RK4. Throws JetRadiusExceeded when tau is not well
/// inside the radius suggested by the coefficient jets, and DepthTooSmall when
/// the extrapolated one-sided limits move by more than 1e-6 between layers.
StepSolution integrate_inward(const PantographForm& form, const InitialData& data,
                              int depth = kDefaultDepth,
                              int steps_per_layer = kDefaultStepsPerLayer);

/// Upper bound for |alpha|, |beta|, |gamma| on [-tau, tau]: sum |c_n| tau^n.
double coefficient_bound(const PantographForm& form, double tau);

/// Every sample with |t| <= tau/|lambda| satisfies
/// |y(t)| <= (|phi| + K tau/|lambda|) exp(2K (tau/|lambda| - |t|)).
bool gronwall_check(const StepSolution& solution, double K);

struct MatchResult {
  InitialData data;
  double c_minus;
  double c_plus;
  double residual;  // |Lambda- - y0| + |Lambda+ - y0| on the matched solution
  StepSolution solution;
};

/// Constant data c- on I-, c+ on I+ with Lambda(phi) = (y0, y0). The four data
/// (+-1, +-1) must land in the four open quadrants first (PreconditionViolation
/// otherwise); SingularMatching if the 2x2 linear part is singular.
MatchResult match_initial(const PantographForm& form, double tau, double y0,
                          int depth = kDefaultDepth, int steps_per_layer = kDefaultStepsPerLayer);

/// Removes from psi the part seen by Lambda, leaving a perturbation in its kernel:
/// psi - (a 1_{I-} + c 1_{I+}) with the linear part of Lambda vanishing on it.
InitialData project_to_kernel(const PantographForm& form, const InitialData& psi,
                              int depth = kDefaultDepth,
                              int steps_per_layer = kDefaultStepsPerLayer);

struct JetRow {
  int n;
  double fitted_coeff;     // from the sampled solution
  double recursion_coeff;  // from taylor_coefficients
  double gap;
  bool noise_floor;  // fit lost its significant digits
};

/// Taylor coefficients of the sampled solution at 0 next to the formal ones.
/// Degree-8 least-squares fits over |t| <= r and r/2 are combined by
/// Richardson for each layer boundary r in [1e-4, rho_max]; each coefficient
/// is read where neighbouring radii agree best.
std::vector<JetRow> jet_comparison(const StepSolution& solution, const PantographForm& form,
                                   double y0, int n_max, double rho_max = 0.05);

/// CSV `t,y,layer` with the initial data as layer 0.
void write_solution_csv(std::ostream& out, const StepSolution& solution);

struct SolutionSample {
  double t;
  double y;
  int layer;
};
std::vector<SolutionSample> read_solution_csv(std::istream& in);

}  // namespace shiftlab
