#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "shiftlab/series.hpp"

namespace shiftlab {

/// eta(t) = t0 + lambda (t - t0)
struct Affine {
  double lambda;
  double t0;
};

/// eta(t) = t + (lambda - 1) sin t + offset. An offset that is a multiple of
/// 2 pi selects a branch t - r(t) + 2 pi m of the periodic delay family.
struct SineShift {
  double lambda;
  double offset = 0.0;
};

/// eta given by a Taylor jet; evaluation is restricted to |t - center| <= domain_radius.
struct SeriesMap {
  TruncatedSeries jet;
  double domain_radius = std::numeric_limits<double>::infinity();
};

/// Arbitrary evaluator pair. Has no jet.
struct GenericMap {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

class ShiftMap {
 public:
  using Variant = std::variant<Affine, SineShift, SeriesMap, GenericMap>;

  ShiftMap(Affine m) : map_(m) {}
  ShiftMap(SineShift m) : map_(m) {}
  ShiftMap(SeriesMap m) : map_(std::move(m)) {}
  ShiftMap(GenericMap m) : map_(std::move(m)) {}

  double value(double t) const;
  double derivative(double t) const;
  bool in_domain(double t) const noexcept;

  /// Taylor jet of eta about `center` through `order`. Throws JetTooShort for a
  /// SeriesMap of insufficient order and InvalidArgument for a GenericMap.
  TruncatedSeries jet(double center, int order) const;

  const Variant& variant() const noexcept { return map_; }
  bool is_affine() const noexcept { return std::holds_alternative<Affine>(map_); }

 private:
  Variant map_;
};

enum class PointClass { Contractive, Expansive, Neutral };

std::string_view to_string(PointClass c) noexcept;

/// Neutral band is |multiplier| within 1e-9 of 1.
PointClass classify_multiplier(double multiplier) noexcept;

struct FixedPointRecord {
  double t_star;
  int period_M;
  double multiplier;  // d/dt eta^M at t_star
  PointClass cls;
};

inline constexpr int kDefaultGridCells = 4096;

/// Roots of eta^M(t) - t on [lo, hi]: sign-change bracketing on a uniform grid,
/// bisection to width 1e-8, then Newton polish kept inside the bracket. Roots
/// without a sign change (tangencies) are not reported.
std::vector<FixedPointRecord> find_fixed_points(const ShiftMap& map, double lo, double hi,
                                                int M, double tol,
                                                int grid_cells = kDefaultGridCells);

/// eta^n(t). Throws DomainEscape if the orbit leaves the evaluator domain.
double iterate(const ShiftMap& map, double t, long n);

/// d/dt eta^M at t via the chain rule.
double iterate_derivative(const ShiftMap& map, double t, int M);

struct RotationEstimate {
  double omega;
  double error_bar;  // 1 / n_iter
};

/// Rotation number of a lift of a circle map with period p. The map must satisfy
/// eta(t + p) = eta(t) + p and be nondecreasing.
RotationEstimate rotation_number(const ShiftMap& map, double period, double t0, long n_iter);

/// Whether some eta^{M n}(t), n <= max_iter, lands within capture_radius of the
/// orbit of a contractive record. Returns false on divergence and throws
/// InconclusiveBudget when neither happens.
bool basin_test(const ShiftMap& map, double t, const FixedPointRecord& record, long max_iter,
                double capture_radius);

enum class Label { Analytic, Nonanalytic };

std::string_view to_string(Label l) noexcept;

struct LabeledPoint {
  int k;  // orbit index; negative for backward images
  double t;
  Label label;
};

struct Seed {
  double t;
  Label label;
};

/// Forward orbits inherit seed labels; with `monotone`, backward images found by
/// root-finding eta(s) = t inherit them too.
std::vector<LabeledPoint> propagate_classification(const ShiftMap& map,
                                                   std::span<const Seed> seeds, int n_steps,
                                                   bool monotone);

/// Preimage s with eta(s) = t for a nondecreasing map.
double preimage(const ShiftMap& map, double t);

/// CSV `k,t,label`.
void write_orbit_csv(std::ostream& out, std::span<const LabeledPoint> points);
std::vector<LabeledPoint> read_orbit_csv(std::istream& in);

}  // namespace shiftlab
