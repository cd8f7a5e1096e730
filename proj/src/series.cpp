#include "shiftlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "shiftlab/error.hpp"

namespace shiftlab {

namespace {

constexpr double kCenterTol = 1e-14;
constexpr double kCompositionTol = 1e-12;

void require_same_center(const TruncatedSeries& s1, const TruncatedSeries& s2) {
  if (std::abs(s1.center() - s2.center()) > kCenterTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "series centers differ: " << s1.center() << " vs " << s2.center();
    throw Error(ErrorCode::CenterMismatch, msg.str());
  }
}

}  // namespace

TruncatedSeries::TruncatedSeries(double center, std::vector<double> coeffs)
    : center_(center), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a truncated series needs at least one coefficient");
  }
  if (!std::isfinite(center_)) {
    throw Error(ErrorCode::NonFiniteCoefficient, "series center is not finite");
  }
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    if (!std::isfinite(coeffs_[n])) {
      throw Error(ErrorCode::NonFiniteCoefficient,
                  "series coefficient " + std::to_string(n) + " is not finite");
    }
  }
}

TruncatedSeries TruncatedSeries::zero(double center, int order) {
  return constant(center, 0.0, order);
}

TruncatedSeries TruncatedSeries::constant(double center, double value, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "negative series order");
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = value;
  return {center, std::move(c)};
}

TruncatedSeries TruncatedSeries::identity(double center, int order) {
  auto s = constant(center, center, order);
  if (order >= 1) s.coeffs_[1] = 1.0;
  return s;
}

double TruncatedSeries::evaluate(double t) const noexcept {
  const double dt = t - center_;
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * dt + *it;
  return acc;
}

TruncatedSeries TruncatedSeries::recentered(double new_center) const {
  return {new_center, coeffs_};
}

TruncatedSeries TruncatedSeries::truncated(int order) const {
  if (order < 0 || order > this->order()) {
    throw Error(ErrorCode::InvalidArgument, "truncation order out of range");
  }
  return {center_, std::vector<double>(coeffs_.begin(), coeffs_.begin() + order + 1)};
}

TruncatedSeries linear_combine(double c1, const TruncatedSeries& s1, double c2,
                               const TruncatedSeries& s2) {
  require_same_center(s1, s2);
  const int order = std::min(s1.order(), s2.order());
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  for (int n = 0; n <= order; ++n) out[n] = c1 * s1[n] + c2 * s2[n];
  return {s1.center(), std::move(out)};
}

TruncatedSeries mul(const TruncatedSeries& s1, const TruncatedSeries& s2) {
  require_same_center(s1, s2);
  const int order = std::min(s1.order(), s2.order());
  const auto a = s1.coeffs();
  const auto b = s2.coeffs();
  std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
  for (int n = 0; n <= order; ++n) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) acc += a[k] * b[n - k];
    out[n] = acc;
  }
  return {s1.center(), std::move(out)};
}

TruncatedSeries compose(const TruncatedSeries& outer, const TruncatedSeries& inner) {
  const double scale = std::max({1.0, std::abs(outer.center()), std::abs(inner[0])});
  if (std::abs(inner[0] - outer.center()) > kCompositionTol * scale) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "inner jet value " << inner[0] << " does not match outer center "
        << outer.center();
    throw Error(ErrorCode::CompositionMismatch, msg.str());
  }
  const int order = std::min(outer.order(), inner.order());
  // Displacement of the inner jet from the outer center, with zero constant term.
  std::vector<double> d(inner.coeffs().begin(), inner.coeffs().begin() + order + 1);
  d[0] = 0.0;
  const auto a = outer.coeffs();

  std::vector<double> acc(static_cast<std::size_t>(order) + 1, 0.0);
  std::vector<double> next(acc.size());
  for (int k = order; k >= 0; --k) {
    // acc <- acc * d + a_k; d has no constant term, so only lower indices feed in.
    std::fill(next.begin(), next.end(), 0.0);
    for (int n = 1; n <= order; ++n) {
      double s = 0.0;
      for (int j = 1; j <= n; ++j) s += d[j] * acc[n - j];
      next[n] = s;
    }
    next[0] = a[k];
    acc.swap(next);
  }
  return {inner.center(), std::move(acc)};
}

TruncatedSeries differentiate(const TruncatedSeries& s) {
  if (s.order() == 0) return TruncatedSeries::zero(s.center(), 0);
  std::vector<double> out(static_cast<std::size_t>(s.order()));
  for (int n = 0; n < s.order(); ++n) out[n] = (n + 1) * s[n + 1];
  return {s.center(), std::move(out)};
}

TruncatedSeries revert(const TruncatedSeries& s) {
  if (s.order() < 1 || s[1] == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "reversion needs a nonzero linear coefficient");
  }
  const int order = s.order();
  const auto b = s.coeffs();
  const std::size_t size = static_cast<std::size_t>(order) + 1;
  // q(y) = sum q_n y^n solves p(q(y)) = y with p(x) = s(center + x) - s[0].
  std::vector<double> q(size, 0.0);
  // powers[k][n] = coefficient n of q^k.
  std::vector<std::vector<double>> powers(size, std::vector<double>(size, 0.0));
  powers[0][0] = 1.0;
  q[1] = 1.0 / b[1];
  powers[1][1] = q[1];
  for (int n = 2; n <= order; ++n) {
    double rhs = 0.0;
    for (int k = 2; k <= n; ++k) {
      double c = 0.0;
      for (int j = 1; j <= n - k + 1; ++j) c += q[j] * powers[k - 1][n - j];
      powers[k][n] = c;
      rhs += b[k] * c;
    }
    q[n] = -rhs / b[1];
    powers[1][n] = q[n];
  }
  q[0] = s.center();
  return {s[0], std::move(q)};
}

RadiusEstimate radius_estimate(const TruncatedSeries& s, int window) {
  if (window < 8) throw Error(ErrorCode::InvalidArgument, "root-test window must be at least 8");
  if (window > s.order()) {
    throw Error(ErrorCode::WindowTooLarge, "root-test window " + std::to_string(window) +
                                               " exceeds series order " +
                                               std::to_string(s.order()));
  }
  double limsup = 0.0;
  bool any = false;
  for (int n = std::max(1, s.order() - window + 1); n <= s.order(); ++n) {
    const double a = std::abs(s[n]);
    if (a == 0.0) continue;
    any = true;
    limsup = std::max(limsup, std::exp(std::log(a) / n));
  }
  if (!any) return {0.0, std::numeric_limits<double>::infinity()};
  return {limsup, 1.0 / limsup};
}

void write_series_csv(std::ostream& out, const TruncatedSeries& s) {
  out << "n,coeff\n";
  char buf[64];
  for (int n = 0; n <= s.order(); ++n) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", n, s[n]);
    out << buf;
  }
}

TruncatedSeries read_series_csv(std::istream& in, double center) {
  std::string line;
  if (!std::getline(in, line) || line != "n,coeff") {
    throw Error(ErrorCode::ParseError, "series CSV must start with header 'n,coeff'");
  }
  std::vector<double> coeffs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "malformed row: " + line);
    const int n = std::stoi(line.substr(0, comma));
    if (n != static_cast<int>(coeffs.size())) {
      throw Error(ErrorCode::ParseError, "series CSV rows out of order at n=" + std::to_string(n));
    }
    coeffs.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  return {center, std::move(coeffs)};
}

}  // namespace shiftlab
