#include "shiftlab/kreigen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "shiftlab/error.hpp"
#include "shiftlab/format.hpp"

namespace shiftlab {

namespace {

using std::numbers::pi;

bool power_of_two(int g) { return g > 0 && (g & (g - 1)) == 0; }

// Antiderivative of the periodic piecewise-linear interpolant of F, I(0) = 0.
class PeriodicIntegral {
 public:
  PeriodicIntegral(const std::vector<double>& F, double period)
      : F_(F), period_(period), h_(period / F.size()), cum_(F.size() + 1, 0.0) {
    const std::size_t G = F.size();
    for (std::size_t i = 0; i < G; ++i) {
      cum_[i + 1] = cum_[i] + 0.5 * h_ * (F_[i] + F_[(i + 1) % G]);
    }
  }

  double operator()(double s) const {
    const std::size_t G = F_.size();
    const double q = std::floor(s / period_);
    const double rem = s - q * period_;
    double pos = rem / h_;
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i >= G) i = G - 1;
    const double th = pos - static_cast<double>(i);
    const double f0 = F_[i], f1 = F_[(i + 1) % G];
    const double partial = h_ * (th * f0 + 0.5 * th * th * (f1 - f0));
    return q * cum_[G] + cum_[i] + partial;
  }

 private:
  const std::vector<double>& F_;
  double period_;
  double h_;
  std::vector<double> cum_;
};

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

PeriodicFunction PeriodicFunction::sample(const std::function<double(double)>& f, double period,
                                          int G) {
  PeriodicFunction out{period, std::vector<double>(static_cast<std::size_t>(std::max(G, 0)))};
  for (int j = 0; j < G; ++j) out.samples[j] = f(out.node(j));
  out.validate();
  return out;
}

void PeriodicFunction::validate() const {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw Error(ErrorCode::InvalidArgument, "period must be positive and finite");
  }
  if (G() < 64 || !power_of_two(G())) {
    throw Error(ErrorCode::InvalidArgument, "grid size must be a power of two >= 64");
  }
  for (double s : samples) {
    if (!std::isfinite(s)) throw Error(ErrorCode::NonFiniteCoefficient, "non-finite sample");
  }
}

IntegralOperatorSpec IntegralOperatorSpec::sine_family(double lambda, int m, int G) {
  const double two_pi = 2 * pi;
  IntegralOperatorSpec spec{
      PeriodicFunction::sample(
          [=](double t) { return -(lambda - 1.0) * std::sin(t) + two_pi * m; }, two_pi, G),
      PeriodicFunction::sample([](double) { return 1.0; }, two_pi, G), SineFamilyParams{lambda, m}};
  spec.validate();
  return spec;
}

void IntegralOperatorSpec::validate() const {
  r.validate();
  rho.validate();
  if (r.G() != rho.G() || r.period != rho.period) {
    throw Error(ErrorCode::GridMismatch, "r and rho live on different grids");
  }
  if (*std::min_element(r.samples.begin(), r.samples.end()) <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "delay r must be strictly positive");
  }
  if (*std::min_element(rho.samples.begin(), rho.samples.end()) <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "weight rho must be strictly positive");
  }
}

PeriodicFunction apply_L(const IntegralOperatorSpec& spec, const PeriodicFunction& x) {
  if (x.G() != spec.r.G() || x.period != spec.r.period) {
    throw Error(ErrorCode::GridMismatch, "function grid differs from the operator grid");
  }
  const int G = x.G();
  std::vector<double> F(static_cast<std::size_t>(G));
  for (int j = 0; j < G; ++j) F[j] = spec.rho.samples[j] * x.samples[j];
  const PeriodicIntegral I(F, x.period);
  PeriodicFunction out{x.period, std::vector<double>(static_cast<std::size_t>(G))};
  for (int j = 0; j < G; ++j) {
    const double t = x.node(j);
    out.samples[j] = I(t) - I(t - spec.r.samples[j]);
  }
  return out;
}

EigenResult power_iteration(const IntegralOperatorSpec& spec, double tol, int max_iter,
                            const std::optional<PeriodicFunction>& initial) {
  spec.validate();
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  PeriodicFunction x = initial ? *initial : PeriodicFunction{spec.r.period,
                                                             std::vector<double>(spec.r.samples.size(), 1.0)};
  if (x.G() != spec.r.G()) throw Error(ErrorCode::GridMismatch, "initial guess grid differs");
  {
    const double s = sup_norm(x.samples);
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial guess is zero");
    for (double& v : x.samples) v /= s;
  }

  double kappa_prev = 0.0;
  int stable = 0;
  for (int it = 1; it <= max_iter; ++it) {
    PeriodicFunction y = apply_L(spec, x);
    const double kappa = sup_norm(y.samples);
    double residual = 0.0;
    for (int j = 0; j < x.G(); ++j) {
      residual = std::max(residual, std::abs(y.samples[j] - kappa * x.samples[j]));
    }
    const double change = std::abs(kappa - kappa_prev) / kappa;
    stable = (it > 1 && change <= tol) ? stable + 1 : 0;
    for (double& v : y.samples) v /= kappa;
    x = std::move(y);
    kappa_prev = kappa;
    if (stable >= 3 && residual <= tol) {
      // exact residual and kappa for the returned iterate
      const PeriodicFunction lx = apply_L(spec, x);
      const double k = sup_norm(lx.samples);
      double res = 0.0;
      for (int j = 0; j < x.G(); ++j) res = std::max(res, std::abs(lx.samples[j] - k * x.samples[j]));
      if (*std::min_element(x.samples.begin(), x.samples.end()) <= 0.0) {
        throw Error(ErrorCode::PositivityLost, "eigenfunction iterate is not strictly positive");
      }
      EigenResult out{k, std::move(x), res, 0.0, 0.0, it};
      const BoundCheck b = verify_bounds(spec, out);
      out.bound_lo = b.lo;
      out.bound_hi = b.hi;
      return out;
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "power iteration did not settle in " + std::to_string(max_iter) + " steps");
}

BoundCheck verify_bounds(const IntegralOperatorSpec& spec, const EigenResult& result) {
  const PeriodicFunction one{spec.r.period, std::vector<double>(spec.r.samples.size(), 1.0)};
  const PeriodicFunction w = apply_L(spec, one);
  const auto [lo, hi] = std::minmax_element(w.samples.begin(), w.samples.end());
  const double G = spec.r.G();
  const double eps = 10.0 * spec.r.period / (G * G);
  return {*lo, *hi, *lo - eps <= result.kappa && result.kappa <= *hi + eps};
}

TruncatedSeries spectral_jet(const PeriodicFunction& f, double t, int order) {
  f.validate();
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "order must be nonnegative");
  const int G = f.G();
  const double w0 = 2 * pi / f.period;
  std::vector<std::complex<double>> c(static_cast<std::size_t>(G));
  for (int k = 0; k < G; ++k) {
    std::complex<double> s = 0.0;
    for (int j = 0; j < G; ++j) s += f.samples[j] * std::polar(1.0, -2 * pi * k * j / G);
    c[k] = s / static_cast<double>(G);
  }
  double cmax = 0.0;
  for (const auto& v : c) cmax = std::max(cmax, std::abs(v));

  std::vector<double> jet(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 0; k < G; ++k) {
    if (std::abs(c[k]) < 1e-13 * cmax) continue;
    const int kk = k <= G / 2 ? k : k - G;
    const std::complex<double> ik(0.0, kk * w0);
    std::complex<double> term = c[k] * std::polar(1.0, kk * w0 * t);  // n = 0
    for (int n = 0; n <= order; ++n) {
      if (n > 0) term *= ik / static_cast<double>(n);
      jet[n] += term.real();
    }
  }
  return {t, std::move(jet)};
}

LocalLinearDDE to_ode_coefficients(const IntegralOperatorSpec& spec, const EigenResult& result,
                                   int m_branch, double t0, int N) {
  if (result.kappa == 0.0) throw Error(ErrorCode::InvalidArgument, "kappa must be nonzero");
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "order must be nonnegative");
  const double kappa = result.kappa;
  const double shift = 2 * pi * m_branch;

  if (spec.sine) {
    const auto [lambda, m] = *spec.sine;
    const ShiftMap map(SineShift{lambda, 2 * pi * (m_branch - m)});
    if (std::abs(map.value(t0) - t0) > 1e-8) {
      throw Error(ErrorCode::BranchNotFixed, "eta(t0) != t0 on branch " + std::to_string(m_branch));
    }
    std::vector<double> b(static_cast<std::size_t>(N) + 1);
    const TruncatedSeries deta = differentiate(map.jet(t0, N + 1));
    for (int n = 0; n <= N; ++n) b[n] = -deta[n] / kappa;
    return {TruncatedSeries::constant(t0, 1.0 / kappa, N), TruncatedSeries(t0, std::move(b)),
            TruncatedSeries::zero(t0, N), map, t0};
  }

  const TruncatedSeries r_jet = spectral_jet(spec.r, t0, N + 1);
  std::vector<double> e(r_jet.coeffs().begin(), r_jet.coeffs().end());
  for (double& v : e) v = -v;
  e[0] += t0 + shift;
  e[1] += 1.0;
  if (std::abs(e[0] - t0) > 1e-8) {
    throw Error(ErrorCode::BranchNotFixed, "eta(t0) != t0 on branch " + std::to_string(m_branch));
  }
  e[0] = t0;
  const TruncatedSeries eta_jet(t0, std::move(e));
  const TruncatedSeries rho_jet = spectral_jet(spec.rho, t0, N);
  const TruncatedSeries rho_eta = compose(rho_jet, eta_jet.truncated(N));
  const TruncatedSeries b = mul(differentiate(eta_jet), rho_eta);
  std::vector<double> bc(b.coeffs().begin(), b.coeffs().end());
  for (double& v : bc) v = -v / kappa;
  std::vector<double> ac(rho_jet.coeffs().begin(), rho_jet.coeffs().end());
  for (double& v : ac) v /= kappa;
  return {TruncatedSeries(t0, std::move(ac)), TruncatedSeries(t0, std::move(bc)),
          TruncatedSeries::zero(t0, N), SeriesMap{eta_jet}, t0};
}

void write_eigenfunction_csv(std::ostream& out, const PeriodicFunction& x) {
  out << "t,x\n";
  for (int j = 0; j < x.G(); ++j) {
    out << format_double(x.node(j)) << ',' << format_double(x.samples[j]) << '\n';
  }
}

PeriodicFunction read_eigenfunction_csv(std::istream& in, double period) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x", 0) != 0) {
    throw Error(ErrorCode::ParseError, "missing header t,x");
  }
  PeriodicFunction f{period, {}};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "malformed row: " + line);
    const char* start = line.c_str() + comma + 1;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) throw Error(ErrorCode::ParseError, "bad number in row: " + line);
    f.samples.push_back(v);
  }
  f.validate();
  return f;
}

}  // namespace shiftlab
