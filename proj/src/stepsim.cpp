#include "shiftlab/stepsim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "shiftlab/error.hpp"
#include "shiftlab/format.hpp"

namespace shiftlab {

namespace {

constexpr int kFitDegree = 8;

SampledInterval sample_interval(double a, double b, int nodes,
                                const std::function<double(double)>& f) {
  SampledInterval s{a, b, std::vector<double>(static_cast<std::size_t>(nodes))};
  for (int i = 0; i < nodes; ++i) s.y[i] = f(s.node(i));
  return s;
}

bool close(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max(1.0, std::max(std::abs(x), std::abs(y)));
}

double jet_abs_sum(const TruncatedSeries& s, double tau) {
  double total = 0.0, p = 1.0;
  for (double c : s.coeffs()) {
    total += std::abs(c) * p;
    p *= tau;
  }
  return total;
}

void check_jet_radius(const TruncatedSeries& s, double tau, const char* name) {
  if (s.order() < 8) return;
  const double radius = radius_estimate(s, std::max(8, s.order() / 4)).radius_estimate;
  if (!(tau < 0.5 * radius)) {
    throw Error(ErrorCode::JetRadiusExceeded,
                std::string(name) + " jet radius estimate " + format_double(radius) +
                    " is not above 2 tau = " + format_double(2 * tau));
  }
}

struct Lambdas {
  double minus;
  double plus;
};

Lambdas lambdas_of(const PantographForm& form, const InitialData& data, int depth, int steps) {
  const StepSolution s = integrate_inward(form, data, depth, steps);
  return {s.lambda_minus, s.lambda_plus};
}

}  // namespace

double SampledInterval::at(double t) const noexcept {
  const std::size_t n = y.size();
  const double h = (b - a) / static_cast<double>(n - 1);
  const double p = (t - a) / h;
  long i0 = static_cast<long>(std::floor(p)) - 1;
  i0 = std::clamp(i0, 0L, static_cast<long>(n) - 4);
  double out = 0.0;
  for (int j = 0; j < 4; ++j) {
    double w = 1.0;
    for (int m = 0; m < 4; ++m) {
      if (m != j) w *= (p - static_cast<double>(i0 + m)) / static_cast<double>(j - m);
    }
    out += w * y[static_cast<std::size_t>(i0 + j)];
  }
  return out;
}

InitialData InitialData::from_functions(double tau, double lambda,
                                        const std::function<double(double)>& minus,
                                        const std::function<double(double)>& plus, int nodes) {
  const double inner = tau / std::abs(lambda);
  InitialData d{tau, sample_interval(-tau, -inner, nodes, minus),
                sample_interval(inner, tau, nodes, plus)};
  d.validate(lambda);
  return d;
}

InitialData InitialData::constant(double tau, double lambda, double c_minus, double c_plus,
                                  int nodes) {
  return from_functions(
      tau, lambda, [c_minus](double) { return c_minus; }, [c_plus](double) { return c_plus; },
      nodes);
}

void InitialData::validate(double lambda) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  if (!(std::abs(lambda) > 1.0)) throw Error(ErrorCode::NotExpansive, "needs |lambda| > 1");
  const double inner = tau / std::abs(lambda);
  if (phi_minus.y.size() < 64 || phi_plus.y.size() < 64) {
    throw Error(ErrorCode::InvalidArgument, "initial data needs at least 64 nodes per side");
  }
  if (!close(phi_minus.a, -tau) || !close(phi_minus.b, -inner) || !close(phi_plus.a, inner) ||
      !close(phi_plus.b, tau)) {
    throw Error(ErrorCode::InvalidArgument, "initial data grids must cover I- and I+ exactly");
  }
  for (const auto* s : {&phi_minus, &phi_plus}) {
    for (double v : s->y) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteCoefficient, "non-finite initial data");
    }
  }
}

double InitialData::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : phi_minus.y) m = std::max(m, std::abs(v));
  for (double v : phi_plus.y) m = std::max(m, std::abs(v));
  return m;
}

InitialData combine(double a, const InitialData& phi1, double c, const InitialData& phi2) {
  if (phi1.phi_minus.y.size() != phi2.phi_minus.y.size() ||
      phi1.phi_plus.y.size() != phi2.phi_plus.y.size() || !close(phi1.tau, phi2.tau)) {
    throw Error(ErrorCode::GridMismatch, "initial data grids differ");
  }
  InitialData out = phi1;
  for (std::size_t i = 0; i < out.phi_minus.y.size(); ++i) {
    out.phi_minus.y[i] = a * phi1.phi_minus.y[i] + c * phi2.phi_minus.y[i];
  }
  for (std::size_t i = 0; i < out.phi_plus.y.size(); ++i) {
    out.phi_plus.y[i] = a * phi1.phi_plus.y[i] + c * phi2.phi_plus.y[i];
  }
  return out;
}

StepSolution integrate_inward(const PantographForm& form, const InitialData& data, int depth,
                              int steps_per_layer) {
  const double lambda = form.lambda;
  data.validate(lambda);
  if (depth < 3) throw Error(ErrorCode::InvalidArgument, "depth must be at least 3");
  if (steps_per_layer < 64) throw Error(ErrorCode::InvalidArgument, "need >= 64 steps per layer");
  const double tau = data.tau;
  check_jet_radius(form.alpha, tau, "alpha");
  check_jet_radius(form.beta, tau, "beta");
  check_jet_radius(form.gamma, tau, "gamma");

  const double L = std::abs(lambda);
  const int S = steps_per_layer;
  StepSolution sol{tau, lambda, {data.phi_minus}, {data.phi_plus}, 0.0, 0.0, data.sup_norm(), 0.0};
  sol.minus.reserve(depth + 1);
  sol.plus.reserve(depth + 1);

  const auto rhs = [&](double t, double y, const SampledInterval& delayed) {
    return form.alpha.evaluate(t) * y + form.beta.evaluate(t) * delayed.at(lambda * t) +
           form.gamma.evaluate(t);
  };

  double outer = tau / L;  // |t| at the outer edge of layer k
  for (int k = 1; k <= depth; ++k) {
    const double inner = outer / L;
    const double h = (outer - inner) / S;
    // y(lambda t) for t > 0 lives on the side of sign(lambda)
    const SampledInterval& from_plus = lambda > 0 ? sol.plus[k - 1] : sol.minus[k - 1];
    const SampledInterval& from_minus = lambda > 0 ? sol.minus[k - 1] : sol.plus[k - 1];

    SampledInterval right{inner, outer, std::vector<double>(static_cast<std::size_t>(S) + 1)};
    {
      double t = outer;
      double y = sol.plus[k - 1].y.front();
      right.y[S] = y;
      for (int i = 1; i <= S; ++i) {
        const double dt = -h;
        const double k1 = rhs(t, y, from_plus);
        const double k2 = rhs(t + dt / 2, y + dt / 2 * k1, from_plus);
        const double k3 = rhs(t + dt / 2, y + dt / 2 * k2, from_plus);
        const double k4 = rhs(t + dt, y + dt * k3, from_plus);
        y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t = outer - i * h;
        right.y[S - i] = y;
      }
    }
    SampledInterval left{-outer, -inner, std::vector<double>(static_cast<std::size_t>(S) + 1)};
    {
      double t = -outer;
      double y = sol.minus[k - 1].y.back();
      left.y[0] = y;
      for (int i = 1; i <= S; ++i) {
        const double k1 = rhs(t, y, from_minus);
        const double k2 = rhs(t + h / 2, y + h / 2 * k1, from_minus);
        const double k3 = rhs(t + h / 2, y + h / 2 * k2, from_minus);
        const double k4 = rhs(t + h, y + h * k3, from_minus);
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t = -outer + i * h;
        left.y[i] = y;
      }
    }
    sol.minus.push_back(std::move(left));
    sol.plus.push_back(std::move(right));
    outer = inner;
  }

  // Endpoint values approach the limit linearly in t, and t shrinks by |lambda| per layer.
  const auto extrapolate = [&](double e_prev, double e) { return (L * e - e_prev) / (L - 1.0); };
  const auto edge_minus = [&](int k) { return sol.minus[k].y.back(); };
  const auto edge_plus = [&](int k) { return sol.plus[k].y.front(); };
  const double lm = extrapolate(edge_minus(depth - 1), edge_minus(depth));
  const double lp = extrapolate(edge_plus(depth - 1), edge_plus(depth));
  const double lm_prev = extrapolate(edge_minus(depth - 2), edge_minus(depth - 1));
  const double lp_prev = extrapolate(edge_plus(depth - 2), edge_plus(depth - 1));
  sol.lambda_minus = lm;
  sol.lambda_plus = lp;
  sol.richardson_gap = std::max(std::abs(lm - lm_prev), std::abs(lp - lp_prev));
  if (!std::isfinite(lm) || !std::isfinite(lp) ||
      sol.richardson_gap > 1e-6 * std::max(1.0, sol.sup_norm_phi)) {
    throw Error(ErrorCode::DepthTooSmall,
                "one-sided limits still move by " + format_double(sol.richardson_gap));
  }
  return sol;
}

double coefficient_bound(const PantographForm& form, double tau) {
  return std::max({jet_abs_sum(form.alpha, tau), jet_abs_sum(form.beta, tau),
                   jet_abs_sum(form.gamma, tau)});
}

bool gronwall_check(const StepSolution& solution, double K) {
  const double edge = solution.tau / std::abs(solution.lambda);
  const double base = solution.sup_norm_phi + K * edge;
  for (std::size_t k = 1; k < solution.plus.size(); ++k) {
    for (const auto* layer : {&solution.minus[k], &solution.plus[k]}) {
      for (std::size_t i = 0; i < layer->y.size(); ++i) {
        const double t = std::abs(layer->node(i));
        if (t > edge * (1 + 1e-12)) continue;
        if (!(std::abs(layer->y[i]) <= base * std::exp(2 * K * (edge - t)))) return false;
      }
    }
  }
  return true;
}

namespace {

struct AffineLambda {
  Lambdas offset;
  Eigen::Matrix2d linear;  // columns: response to 1 on I-, 1 on I+
};

AffineLambda affine_lambda(const PantographForm& form, double tau, int nodes, int depth,
                           int steps) {
  const double lambda = form.lambda;
  const Lambdas o = lambdas_of(form, InitialData::constant(tau, lambda, 0, 0, nodes), depth, steps);
  const Lambdas e1 = lambdas_of(form, InitialData::constant(tau, lambda, 1, 0, nodes), depth, steps);
  const Lambdas e2 = lambdas_of(form, InitialData::constant(tau, lambda, 0, 1, nodes), depth, steps);
  AffineLambda out{o, Eigen::Matrix2d()};
  out.linear << e1.minus - o.minus, e2.minus - o.minus, e1.plus - o.plus, e2.plus - o.plus;
  return out;
}

void require_nonsingular(const Eigen::Matrix2d& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(std::abs(m.determinant()) > 1e-10 * std::max(1.0, scale * scale))) {
    throw Error(ErrorCode::SingularMatching, "linear part of Lambda is singular");
  }
}

}  // namespace

MatchResult match_initial(const PantographForm& form, double tau, double y0, int depth,
                          int steps_per_layer) {
  const double lambda = form.lambda;
  const int nodes = 65;
  for (double cm : {-1.0, 1.0}) {
    for (double cp : {-1.0, 1.0}) {
      const Lambdas l = lambdas_of(form, InitialData::constant(tau, lambda, cm, cp, nodes), depth,
                                   steps_per_layer);
      if (!(l.minus * cm > 0 && l.plus * cp > 0)) {
        throw Error(ErrorCode::PreconditionViolation,
                    "corner data (" + format_double(cm) + ", " + format_double(cp) +
                        ") leaves its quadrant; tau is too large");
      }
    }
  }
  const AffineLambda A = affine_lambda(form, tau, nodes, depth, steps_per_layer);
  require_nonsingular(A.linear);
  const Eigen::Vector2d target(y0 - A.offset.minus, y0 - A.offset.plus);
  const Eigen::Vector2d c = A.linear.fullPivLu().solve(target);
  InitialData data = InitialData::constant(tau, lambda, c(0), c(1), nodes);
  StepSolution sol = integrate_inward(form, data, depth, steps_per_layer);
  const double residual = std::abs(sol.lambda_minus - y0) + std::abs(sol.lambda_plus - y0);
  return {std::move(data), c(0), c(1), residual, std::move(sol)};
}

InitialData project_to_kernel(const PantographForm& form, const InitialData& psi, int depth,
                              int steps_per_layer) {
  const int nodes = static_cast<int>(psi.phi_minus.y.size());
  if (static_cast<int>(psi.phi_plus.y.size()) != nodes) {
    throw Error(ErrorCode::GridMismatch, "both sides of psi need the same node count");
  }
  const AffineLambda A = affine_lambda(form, psi.tau, nodes, depth, steps_per_layer);
  require_nonsingular(A.linear);
  const Lambdas l = lambdas_of(form, psi, depth, steps_per_layer);
  const Eigen::Vector2d seen(l.minus - A.offset.minus, l.plus - A.offset.plus);
  const Eigen::Vector2d c = A.linear.fullPivLu().solve(seen);
  const InitialData basis = InitialData::constant(psi.tau, form.lambda, c(0), c(1), nodes);
  return combine(1.0, psi, -1.0, basis);
}

std::vector<JetRow> jet_comparison(const StepSolution& solution, const PantographForm& form,
                                   double y0, int n_max, double rho_max) {
  if (n_max < 0 || n_max > 5) throw Error(ErrorCode::InvalidArgument, "n_max must be in [0, 5]");
  const double L = std::abs(solution.lambda);
  const auto fit = [&](double radius) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 1; k < solution.plus.size(); ++k) {
      for (const auto* layer : {&solution.minus[k], &solution.plus[k]}) {
        for (std::size_t i = 0; i < layer->y.size(); ++i) {
          const double t = layer->node(i);
          if (std::abs(t) <= radius) pts.emplace_back(t / radius, layer->y[i]);
        }
      }
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), kFitDegree + 1);
    Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t r = 0; r < pts.size(); ++r) {
      double p = 1.0;
      for (int c = 0; c <= kFitDegree; ++c) {
        A(static_cast<Eigen::Index>(r), c) = p;
        p *= pts[r].first;
      }
      b(static_cast<Eigen::Index>(r)) = pts[r].second;
    }
    Eigen::VectorXd u = A.colPivHouseholderQr().solve(b);
    std::array<double, kFitDegree + 1> coeffs{};
    double scale = 1.0;
    for (int c = 0; c <= kFitDegree; ++c) {
      coeffs[c] = u(c) / scale;
      scale *= radius;
    }
    return coeffs;
  };

  // Richardson-refined estimates on a ladder of layer boundaries, down to 1e-4
  std::vector<std::array<double, kFitDegree + 1>> ladder;
  for (double rho = solution.tau / L; rho >= 1e-4; rho /= L) {
    if (rho > rho_max) continue;
    const auto wide = fit(rho);
    const auto narrow = fit(rho / 2);
    std::array<double, kFitDegree + 1> refined{};
    for (int n = 0; n <= kFitDegree; ++n) {
      refined[n] = narrow[n] + (narrow[n] - wide[n]) / (std::pow(2.0, kFitDegree + 1 - n) - 1.0);
    }
    ladder.push_back(refined);
  }
  if (ladder.size() < 2) throw Error(ErrorCode::InvalidArgument, "too few layers inside rho_max");
  const TruncatedSeries y = taylor_coefficients(form, y0, std::max(n_max, 1));

  // per coefficient, the rung where neighbouring radii agree best
  std::vector<JetRow> rows;
  for (int n = 0; n <= n_max; ++n) {
    std::size_t best = 0;
    double spread = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < ladder.size(); ++j) {
      const double d = std::abs(ladder[j][n] - ladder[j + 1][n]);
      if (d < spread) {
        spread = d;
        best = j;
      }
    }
    const double est = ladder[best + 1][n];
    const bool noisy = spread > 0.1 * std::abs(est) && spread > 1e-12;
    rows.push_back({n, est, y[n], std::abs(est - y[n]), noisy});
  }
  return rows;
}

void write_solution_csv(std::ostream& out, const StepSolution& solution) {
  out << "t,y,layer\n";
  for (std::size_t k = 0; k < solution.minus.size(); ++k) {
    for (const auto* layer : {&solution.minus[k], &solution.plus[k]}) {
      for (std::size_t i = 0; i < layer->y.size(); ++i) {
        out << format_double(layer->node(i)) << ',' << format_double(layer->y[i]) << ',' << k
            << '\n';
      }
    }
  }
}

std::vector<SolutionSample> read_solution_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,y,layer", 0) != 0) {
    throw Error(ErrorCode::ParseError, "missing header t,y,layer");
  }
  std::vector<SolutionSample> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.c_str();
    char* end = nullptr;
    SolutionSample s{};
    s.t = std::strtod(p, &end);
    if (end == p || *end != ',') throw Error(ErrorCode::ParseError, "malformed row: " + line);
    p = end + 1;
    s.y = std::strtod(p, &end);
    if (end == p || *end != ',') throw Error(ErrorCode::ParseError, "malformed row: " + line);
    p = end + 1;
    s.layer = static_cast<int>(std::strtol(p, &end, 10));
    if (end == p) throw Error(ErrorCode::ParseError, "malformed row: " + line);
    rows.push_back(s);
  }
  return rows;
}

}  // namespace shiftlab
