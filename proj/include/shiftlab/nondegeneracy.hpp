#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace shiftlab {

/// The symbol zeta_{i,j}, standing for D_t^i D_x^j f.
struct ZetaVar {
  int i;
  int j;
  auto operator<=>(const ZetaVar&) const = default;
};

/// Sorted (variable, exponent) pairs, exponents positive.
using Monomial = std::vector<std::pair<ZetaVar, int>>;

/// Polynomial with exact integer coefficients in the variables zeta_{i,j}, i + j <= n.
class IndexedPolynomial {
 public:
  explicit IndexedPolynomial(int n) : n_(n) {}

  int n() const noexcept { return n_; }
  const std::map<Monomial, long long>& terms() const noexcept { return terms_; }

  /// Adds coeff * monomial; terms that cancel to zero are dropped.
  void add(const Monomial& m, long long coeff);

  IndexedPolynomial partial(ZetaVar v) const;
  std::vector<ZetaVar> variables() const;

  double evaluate(const std::function<double(ZetaVar)>& values) const;

  /// Terms ordered by total degree, e.g. "z10 + z00*z01".
  std::string render() const;

  bool operator==(const IndexedPolynomial&) const = default;

 private:
  int n_;
  std::map<Monomial, long long> terms_;
};

inline constexpr int kDefaultPnCap = 8;

/// P_0 = zeta_{00}; P_n = sum over variables of (dP_{n-1}/dzeta_{k,m}) (zeta_{k+1,m} + zeta_{00} zeta_{k,m+1}).
/// Substituting zeta_{i,j} = D_t^i D_x^j f(t, x(t)) gives x^{(n+1)} for x' = f(t, x).
/// Results are cached; concurrent callers are safe.
const IndexedPolynomial& build_pn(int n, int cap = kDefaultPnCap);

/// Partial derivatives of f(t, u, v) at a fixed (t0, x0) as functions of v.
/// Returning nullopt marks a partial the oracle cannot supply.
struct PartialsOracle {
  std::function<std::optional<double>(int i, int j, double v)> value;  // D_t^i D_x^j f
  std::function<std::optional<double>(int i, int j, double v)> dv;     // D_v D_t^i D_x^j f
};

/// Q_n(v) = d/dv P_n(D_t^i D_x^j f(t0, x0, v)), by the chain rule through P_n.
double evaluate_qn(const PartialsOracle& oracle, double v, int n);

struct NondegeneracyCheck {
  bool holds;
  std::optional<std::pair<int, double>> witness;  // (n, v) with |Q_n(v)| > 1e-10
};

/// Sampled search for a nonvanishing Q_n. A negative answer is inconclusive:
/// Q_n may still be nonzero away from the samples.
NondegeneracyCheck check_nondegeneracy(const PartialsOracle& oracle,
                                       std::span<const double> v_samples, int n_max);

}  // namespace shiftlab
