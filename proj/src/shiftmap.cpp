#include "shiftlab/shiftmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "shiftlab/error.hpp"

namespace shiftlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kNeutralBand = 1e-9;
constexpr double kBracketWidth = 1e-8;

// n-th derivative of sin at c, without the rounding of sin(c + n pi / 2).
double sin_derivative(double c, int n) {
  switch (n % 4) {
    case 0: return std::sin(c);
    case 1: return std::cos(c);
    case 2: return -std::sin(c);
    default: return -std::cos(c);
  }
}

double checked_value(const ShiftMap& map, double t) {
  if (!map.in_domain(t)) {
    throw Error(ErrorCode::DomainEscape, "orbit left the evaluator domain at t=" + std::to_string(t));
  }
  const double v = map.value(t);
  if (!std::isfinite(v)) throw Error(ErrorCode::DomainEscape, "map value is not finite");
  return v;
}

}  // namespace

double ShiftMap::value(double t) const {
  return std::visit(
      overloaded{
          [t](const Affine& m) { return m.t0 + m.lambda * (t - m.t0); },
          [t](const SineShift& m) { return t + (m.lambda - 1.0) * std::sin(t) + m.offset; },
          [t](const SeriesMap& m) { return m.jet.evaluate(t); },
          [t](const GenericMap& m) { return m.value(t); },
      },
      map_);
}

double ShiftMap::derivative(double t) const {
  return std::visit(
      overloaded{
          [](const Affine& m) { return m.lambda; },
          [t](const SineShift& m) { return 1.0 + (m.lambda - 1.0) * std::cos(t); },
          [t](const SeriesMap& m) { return differentiate(m.jet).evaluate(t); },
          [t](const GenericMap& m) { return m.derivative(t); },
      },
      map_);
}

bool ShiftMap::in_domain(double t) const noexcept {
  if (!std::isfinite(t)) return false;
  if (const auto* s = std::get_if<SeriesMap>(&map_)) {
    return std::abs(t - s->jet.center()) <= s->domain_radius;
  }
  return true;
}

TruncatedSeries ShiftMap::jet(double center, int order) const {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "negative jet order");
  return std::visit(
      overloaded{
          [&](const Affine& m) {
            auto s = TruncatedSeries::constant(center, m.t0 + m.lambda * (center - m.t0), order);
            std::vector<double> c(s.coeffs().begin(), s.coeffs().end());
            if (order >= 1) c[1] = m.lambda;
            return TruncatedSeries(center, std::move(c));
          },
          [&](const SineShift& m) {
            std::vector<double> c(static_cast<std::size_t>(order) + 1);
            double factorial = 1.0;
            for (int n = 0; n <= order; ++n) {
              if (n > 0) factorial *= n;
              c[n] = (m.lambda - 1.0) * sin_derivative(center, n) / factorial;
            }
            c[0] += center + m.offset;
            if (order >= 1) c[1] += 1.0;
            return TruncatedSeries(center, std::move(c));
          },
          [&](const SeriesMap& m) {
            if (std::abs(center - m.jet.center()) > 1e-14) {
              throw Error(ErrorCode::InvalidArgument,
                          "a series map only provides its jet at its own center");
            }
            if (m.jet.order() < order) {
              throw Error(ErrorCode::JetTooShort, "map jet has order " +
                                                      std::to_string(m.jet.order()) +
                                                      ", need " + std::to_string(order));
            }
            return m.jet.truncated(order);
          },
          [&](const GenericMap&) -> TruncatedSeries {
            throw Error(ErrorCode::InvalidArgument, "a generic map has no Taylor jet");
          },
      },
      map_);
}

std::string_view to_string(PointClass c) noexcept {
  switch (c) {
    case PointClass::Contractive: return "Contractive";
    case PointClass::Expansive: return "Expansive";
    case PointClass::Neutral: return "Neutral";
  }
  return "Neutral";
}

PointClass classify_multiplier(double multiplier) noexcept {
  const double a = std::abs(multiplier);
  if (a < 1.0 - kNeutralBand) return PointClass::Contractive;
  if (a > 1.0 + kNeutralBand) return PointClass::Expansive;
  return PointClass::Neutral;
}

double iterate(const ShiftMap& map, double t, long n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "iteration count must be nonnegative");
  for (long k = 0; k < n; ++k) t = checked_value(map, t);
  return t;
}

double iterate_derivative(const ShiftMap& map, double t, int M) {
  double d = 1.0;
  for (int k = 0; k < M; ++k) {
    d *= map.derivative(t);
    t = checked_value(map, t);
  }
  return d;
}

std::vector<FixedPointRecord> find_fixed_points(const ShiftMap& map, double lo, double hi,
                                                int M, double tol, int grid_cells) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "period M must be positive");
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "empty search interval");
  if (grid_cells < 1) throw Error(ErrorCode::InvalidArgument, "grid must have at least one cell");

  auto residual = [&](double t) { return iterate(map, t, M) - t; };
  // NaN marks grid nodes whose orbit leaves the domain.
  auto safe_residual = [&](double t) {
    try {
      return residual(t);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainEscape) return std::nan("");
      throw;
    }
  };

  std::vector<double> roots;
  const double h = (hi - lo) / grid_cells;
  std::vector<double> nodes(static_cast<std::size_t>(grid_cells) + 1);
  std::vector<double> g(nodes.size());
  for (int i = 0; i <= grid_cells; ++i) {
    nodes[i] = (i == grid_cells) ? hi : lo + i * h;
    g[i] = safe_residual(nodes[i]);
  }

  auto refine = [&](double a, double ga, double b) {
    // Bisection to the target bracket width.
    while (b - a > kBracketWidth) {
      const double mid = 0.5 * (a + b);
      const double gm = residual(mid);
      if (gm == 0.0) return mid;
      if ((gm < 0.0) == (ga < 0.0)) {
        a = mid;
        ga = gm;
      } else {
        b = mid;
      }
    }
    // Newton polish; a step leaving [a, b] falls back to bisection.
    double t = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
      const double gt = residual(t);
      if (gt == 0.0) return t;
      if ((gt < 0.0) == (ga < 0.0)) {
        a = t;
        ga = gt;
      } else {
        b = t;
      }
      const double slope = iterate_derivative(map, t, M) - 1.0;
      double next = slope != 0.0 ? t - gt / slope : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      const bool settled = std::abs(next - t) <= 4e-16 * std::max(1.0, std::abs(t));
      t = next;
      if (settled) break;
    }
    if (std::abs(residual(t)) <= tol) return t;
    throw Error(ErrorCode::NoConvergence,
                "fixed-point refinement stalled near t=" + std::to_string(t));
  };

  for (int i = 0; i <= grid_cells; ++i) {
    if (std::isnan(g[i])) continue;
    if (g[i] == 0.0) {
      roots.push_back(nodes[i]);
      continue;
    }
    if (i < grid_cells && !std::isnan(g[i + 1]) && g[i + 1] != 0.0 &&
        ((g[i] < 0.0) != (g[i + 1] < 0.0))) {
      roots.push_back(refine(nodes[i], g[i], nodes[i + 1]));
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<FixedPointRecord> out;
  for (double t : roots) {
    if (!out.empty() && std::abs(t - out.back().t_star) <= 1e-9 * std::max(1.0, std::abs(t))) {
      continue;
    }
    const double mult = iterate_derivative(map, t, M);
    out.push_back({t, M, mult, classify_multiplier(mult)});
  }
  return out;
}

RotationEstimate rotation_number(const ShiftMap& map, double period, double t0, long n_iter) {
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidArgument, "period must be positive");
  if (n_iter < 100) throw Error(ErrorCode::InvalidArgument, "rotation number needs n_iter >= 100");

  constexpr int kSamples = 256;
  for (int i = 0; i < kSamples; ++i) {
    const double t = t0 + period * i / kSamples;
    const double lhs = map.value(t + period);
    const double rhs = map.value(t) + period;
    if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, std::abs(rhs))) {
      throw Error(ErrorCode::NotPeriodicLift, "eta(t + p) != eta(t) + p at t=" + std::to_string(t));
    }
    if (map.derivative(t) < -1e-12) {
      throw Error(ErrorCode::NotMonotone, "eta is decreasing at t=" + std::to_string(t));
    }
  }

  // Track the orbit as t0 + winds * p + frac with frac in [0, p) so that long
  // orbits do not lose precision to the growing lift.
  long long winds = 0;
  double frac = 0.0;
  for (long k = 0; k < n_iter; ++k) {
    const double next = map.value(t0 + frac) - t0;
    const double w = std::floor(next / period);
    winds += static_cast<long long>(w);
    frac = next - w * period;
  }
  const double omega = (static_cast<double>(winds) + frac / period) / static_cast<double>(n_iter);
  return {omega, 1.0 / static_cast<double>(n_iter)};
}

bool basin_test(const ShiftMap& map, double t, const FixedPointRecord& record, long max_iter,
                double capture_radius) {
  if (record.cls != PointClass::Contractive) {
    throw Error(ErrorCode::NotContractive, "basin test needs a contractive record");
  }
  if (!(capture_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "capture radius must be positive");

  std::vector<double> orbit;
  double s = record.t_star;
  for (int k = 0; k < record.period_M; ++k) {
    orbit.push_back(s);
    s = checked_value(map, s);
  }
  // The capture ball must sit inside the zone where eta^M contracts.
  constexpr int kChecks = 64;
  for (double center : orbit) {
    for (int i = 0; i <= kChecks; ++i) {
      const double u = center - capture_radius + 2.0 * capture_radius * i / kChecks;
      if (std::abs(iterate_derivative(map, u, record.period_M)) >= 1.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "capture radius exceeds the local contraction zone");
      }
    }
  }

  auto captured = [&](double x) {
    return std::any_of(orbit.begin(), orbit.end(),
                       [&](double c) { return std::abs(x - c) < capture_radius; });
  };
  double x = t;
  for (long n = 0; n <= max_iter; ++n) {
    if (captured(x)) return true;
    if (n == max_iter) break;
    try {
      x = iterate(map, x, record.period_M);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainEscape) return false;
      throw;
    }
    if (std::abs(x) > 1e12 * std::max(1.0, std::abs(record.t_star))) return false;
  }
  throw Error(ErrorCode::InconclusiveBudget,
              "orbit neither captured nor diverged within " + std::to_string(max_iter) + " iterates");
}

std::string_view to_string(Label l) noexcept {
  return l == Label::Analytic ? "Analytic" : "Nonanalytic";
}

double preimage(const ShiftMap& map, double t) {
  auto f = [&](double s) { return map.value(s) - t; };
  double lo = t;
  double hi = t;
  double step = 1.0;
  int expansions = 0;
  while (f(lo) > 0.0) {
    lo -= step;
    step *= 2.0;
    if (++expansions > 80) throw Error(ErrorCode::DomainEscape, "no preimage below t");
  }
  step = 1.0;
  expansions = 0;
  while (f(hi) < 0.0) {
    hi += step;
    step *= 2.0;
    if (++expansions > 80) throw Error(ErrorCode::DomainEscape, "no preimage above t");
  }
  for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<LabeledPoint> propagate_classification(const ShiftMap& map,
                                                   std::span<const Seed> seeds, int n_steps,
                                                   bool monotone) {
  if (n_steps < 0) throw Error(ErrorCode::InvalidArgument, "n_steps must be nonnegative");
  std::vector<LabeledPoint> out;
  for (const Seed& seed : seeds) {
    if (monotone) {
      std::vector<LabeledPoint> back;
      double s = seed.t;
      for (int k = 1; k <= n_steps; ++k) {
        s = preimage(map, s);
        back.push_back({-k, s, seed.label});
      }
      out.insert(out.end(), back.rbegin(), back.rend());
    }
    double s = seed.t;
    out.push_back({0, s, seed.label});
    for (int k = 1; k <= n_steps; ++k) {
      s = checked_value(map, s);
      out.push_back({k, s, seed.label});
    }
  }
  return out;
}

void write_orbit_csv(std::ostream& out, std::span<const LabeledPoint> points) {
  out << "k,t,label\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%s\n", p.k, p.t, to_string(p.label).data());
    out << buf;
  }
}

std::vector<LabeledPoint> read_orbit_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "k,t,label") {
    throw Error(ErrorCode::ParseError, "orbit CSV must start with header 'k,t,label'");
  }
  std::vector<LabeledPoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw Error(ErrorCode::ParseError, "malformed orbit row: " + line);
    }
    const std::string label = line.substr(c2 + 1);
    Label l;
    if (label == "Analytic") {
      l = Label::Analytic;
    } else if (label == "Nonanalytic") {
      l = Label::Nonanalytic;
    } else {
      throw Error(ErrorCode::ParseError, "unknown label: " + label);
    }
    out.push_back({std::stoi(line.substr(0, c1)), std::strtod(line.c_str() + c1 + 1, nullptr), l});
  }
  return out;
}

}  // namespace shiftlab
