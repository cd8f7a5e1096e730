#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace shiftlab {

/// Finite Taylor jet a_0 + a_1 (t - c) + ... + a_N (t - c)^N of an analytic
/// function about the center c. All coefficients are finite binary64 values.
class TruncatedSeries {
 public:
  TruncatedSeries(double center, std::vector<double> coeffs);

  static TruncatedSeries zero(double center, int order);
  static TruncatedSeries constant(double center, double value, int order);
  /// Jet of the identity map t -> t about `center`: [center, 1, 0, ...].
  static TruncatedSeries identity(double center, int order);

  double center() const noexcept { return center_; }
  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](int n) const { return coeffs_.at(static_cast<std::size_t>(n)); }

  /// Horner evaluation of the truncated polynomial at t.
  double evaluate(double t) const noexcept;

  /// Same coefficients about a new center (re-labels the expansion variable).
  TruncatedSeries recentered(double new_center) const;
  TruncatedSeries truncated(int order) const;

  friend bool operator==(const TruncatedSeries&, const TruncatedSeries&) = default;

 private:
  double center_;
  std::vector<double> coeffs_;
};

TruncatedSeries linear_combine(double c1, const TruncatedSeries& s1, double c2,
                               const TruncatedSeries& s2);

/// Cauchy product truncated at the smaller order.
TruncatedSeries mul(const TruncatedSeries& s1, const TruncatedSeries& s2);

/// Jet of outer(inner(t)). The value of `inner` at its center must coincide
/// with the center of `outer`; the result is centered at inner.center().
TruncatedSeries compose(const TruncatedSeries& outer, const TruncatedSeries& inner);

TruncatedSeries differentiate(const TruncatedSeries& s);

/// Compositional inverse of a jet with nonzero linear coefficient. The result
/// is centered at s[0] and maps back to s.center().
TruncatedSeries revert(const TruncatedSeries& s);

struct RadiusEstimate {
  double limsup_estimate;
  double radius_estimate;  // +inf when every sampled coefficient vanishes
};

/// Root test over the last `window` coefficients; zero coefficients skipped.
RadiusEstimate radius_estimate(const TruncatedSeries& s, int window);

/// CSV with header `n,coeff`, 17 significant digits.
void write_series_csv(std::ostream& out, const TruncatedSeries& s);
TruncatedSeries read_series_csv(std::istream& in, double center);

}  // namespace shiftlab
