#include "shiftlab/nondegeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <set>
#include <sstream>

#include "shiftlab/error.hpp"

namespace shiftlab {

namespace {

long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw Error(ErrorCode::CapExceeded, "polynomial coefficient overflow");
  }
  return r;
}

long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw Error(ErrorCode::CapExceeded, "polynomial coefficient overflow");
  }
  return r;
}

Monomial multiply(const Monomial& m, ZetaVar v) {
  Monomial out = m;
  auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == v; });
  if (it != out.end()) {
    ++it->second;
  } else {
    out.emplace_back(v, 1);
    std::sort(out.begin(), out.end());
  }
  return out;
}

int degree(const Monomial& m) {
  int d = 0;
  for (const auto& [v, e] : m) d += e;
  return d;
}

std::string var_name(ZetaVar v) {
  if (v.i < 10 && v.j < 10) return "z" + std::to_string(v.i) + std::to_string(v.j);
  return "z" + std::to_string(v.i) + "_" + std::to_string(v.j);
}

}  // namespace

void IndexedPolynomial::add(const Monomial& m, long long coeff) {
  if (coeff == 0) return;
  for (const auto& [v, e] : m) {
    if (v.i < 0 || v.j < 0 || v.i + v.j > n_) {
      throw Error(ErrorCode::InvalidArgument, "variable index outside i + j <= n");
    }
  }
  auto [it, inserted] = terms_.try_emplace(m, coeff);
  if (!inserted) {
    it->second = checked_add(it->second, coeff);
    if (it->second == 0) terms_.erase(it);
  }
}

IndexedPolynomial IndexedPolynomial::partial(ZetaVar v) const {
  IndexedPolynomial out(n_);
  for (const auto& [mono, c] : terms_) {
    auto it = std::find_if(mono.begin(), mono.end(), [&](const auto& p) { return p.first == v; });
    if (it == mono.end()) continue;
    Monomial reduced = mono;
    auto& slot = reduced[static_cast<std::size_t>(it - mono.begin())];
    const int e = slot.second;
    if (--slot.second == 0) reduced.erase(reduced.begin() + (it - mono.begin()));
    out.add(reduced, checked_mul(c, e));
  }
  return out;
}

std::vector<ZetaVar> IndexedPolynomial::variables() const {
  std::set<ZetaVar> vars;
  for (const auto& [mono, c] : terms_) {
    for (const auto& [v, e] : mono) vars.insert(v);
  }
  return {vars.begin(), vars.end()};
}

double IndexedPolynomial::evaluate(const std::function<double(ZetaVar)>& values) const {
  double total = 0.0;
  for (const auto& [mono, c] : terms_) {
    double term = static_cast<double>(c);
    for (const auto& [v, e] : mono) term *= std::pow(values(v), e);
    total += term;
  }
  return total;
}

std::string IndexedPolynomial::render() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<const Monomial*, long long>> ordered;
  for (const auto& [mono, c] : terms_) ordered.emplace_back(&mono, c);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return degree(*a.first) < degree(*b.first);
  });
  std::ostringstream out;
  bool first = true;
  for (const auto& [mono, c] : ordered) {
    long long mag = c;
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    if (mag < 0) mag = -mag;
    first = false;
    bool need_star = false;
    if (mag != 1 || mono->empty()) {
      out << mag;
      need_star = true;
    }
    for (const auto& [v, e] : *mono) {
      if (need_star) out << "*";
      out << var_name(v);
      if (e > 1) out << "^" << e;
      need_star = true;
    }
  }
  return out.str();
}

const IndexedPolynomial& build_pn(int n, int cap) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be nonnegative");
  if (n > cap) {
    throw Error(ErrorCode::CapExceeded,
                "P_" + std::to_string(n) + " exceeds the cap " + std::to_string(cap));
  }
  // std::deque keeps references stable across push_back.
  static std::mutex mutex;
  static std::deque<IndexedPolynomial> cache;
  std::lock_guard lock(mutex);
  if (cache.empty()) {
    IndexedPolynomial p0(0);
    p0.add({{ZetaVar{0, 0}, 1}}, 1);
    cache.push_back(std::move(p0));
  }
  while (static_cast<int>(cache.size()) <= n) {
    const IndexedPolynomial& prev = cache.back();
    IndexedPolynomial next(prev.n() + 1);
    for (ZetaVar v : prev.variables()) {
      const IndexedPolynomial d = prev.partial(v);
      const ZetaVar shift_t{v.i + 1, v.j};
      const ZetaVar shift_x{v.i, v.j + 1};
      for (const auto& [mono, c] : d.terms()) {
        next.add(multiply(mono, shift_t), c);
        next.add(multiply(multiply(mono, ZetaVar{0, 0}), shift_x), c);
      }
    }
    cache.push_back(std::move(next));
  }
  return cache[static_cast<std::size_t>(n)];
}

double evaluate_qn(const PartialsOracle& oracle, double v, int n) {
  const IndexedPolynomial& p = build_pn(n);
  const auto vars = p.variables();
  std::map<ZetaVar, double> values;
  std::map<ZetaVar, double> dvalues;
  for (ZetaVar z : vars) {
    const auto val = oracle.value ? oracle.value(z.i, z.j, v) : std::nullopt;
    const auto dval = oracle.dv ? oracle.dv(z.i, z.j, v) : std::nullopt;
    if (!val || !dval) {
      throw Error(ErrorCode::OracleGap, "oracle lacks the partial D_t^" + std::to_string(z.i) +
                                            " D_x^" + std::to_string(z.j) + " f");
    }
    values[z] = *val;
    dvalues[z] = *dval;
  }
  const auto lookup = [&](ZetaVar z) { return values.at(z); };
  double q = 0.0;
  for (ZetaVar z : vars) {
    const double dz = dvalues[z];
    if (dz == 0.0) continue;
    q += p.partial(z).evaluate(lookup) * dz;
  }
  return q;
}

NondegeneracyCheck check_nondegeneracy(const PartialsOracle& oracle,
                                       std::span<const double> v_samples, int n_max) {
  if (v_samples.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one v sample");
  for (int n = 0; n <= n_max; ++n) {
    for (double v : v_samples) {
      if (std::abs(evaluate_qn(oracle, v, n)) > 1e-10) return {true, std::make_pair(n, v)};
    }
  }
  return {false, std::nullopt};
}

}  // namespace shiftlab
