#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "shiftlab/error.hpp"
#include "shiftlab/koenigs.hpp"
#include "shiftlab/kreigen.hpp"
#include "shiftlab/nondegeneracy.hpp"
#include "shiftlab/pantograph.hpp"
#include "shiftlab/pipeline.hpp"
#include "shiftlab/shiftmap.hpp"
#include "shiftlab/stepsim.hpp"

namespace shiftlab::cli {

namespace {

using std::numbers::pi;

Json number(double x) {
  // JSON has no inf/nan; keep them readable
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json coeffs(const TruncatedSeries& s) {
  Json a = Json::array();
  for (double c : s.coeffs()) a.push_back(number(c));
  return a;
}

template <class Write>
std::string to_text(Write&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

TruncatedSeries jet_or_constant(const Json& list, double constant, double center, int order) {
  std::vector<double> c = list.get<std::vector<double>>();
  if (c.empty()) return TruncatedSeries::constant(center, constant, order);
  c.resize(std::max<std::size_t>(c.size(), static_cast<std::size_t>(order) + 1), 0.0);
  return TruncatedSeries(center, std::move(c));
}

ShiftMap map_named(const std::string& name, double lambda, double t0) {
  if (name == "affine") return ShiftMap(Affine{lambda, t0});
  if (name == "sine") return ShiftMap(SineShift{lambda});
  throw UsageError("map must be 'affine' or 'sine', got '" + name + "'");
}

Outcome run_classify(const Json& p) {
  const double t0 = p["t0"];
  const int order = p["order"];
  const ShiftMap map = map_named(p["map"], p["lambda"], t0);
  const LocalLinearDDE dde{jet_or_constant(p["a_jet"], p["a0"], t0, order),
                           jet_or_constant(p["b_jet"], p["b0"], t0, order),
                           jet_or_constant(p["h_jet"], p["h0"], t0, order), map, t0};
  ClassifyConfig cfg;
  cfg.jet_order = order;
  cfg.N_max = p["n_max"];
  cfg.w_tol = p["w_tol"];
  const Verdict v = classify_point(dde, p["y0"], cfg);

  Outcome out;
  Json& r = out.result;
  r["verdict"] = std::string(to_string(v.cls));
  r["multiplier"] = number(v.multiplier);
  r["point_class"] = std::string(to_string(v.point_class));
  r["w_inf"] = v.w_inf ? number(*v.w_inf) : Json();
  r["tail_gap"] = v.tail_gap ? number(*v.tail_gap) : Json();
  r["N_used"] = v.N_used ? Json(*v.N_used) : Json();
  r["note"] = v.note;
  r["series"] = v.series ? coeffs(*v.series) : Json();
  if (v.series) {
    out.files.emplace_back("series.csv", to_text([&](std::ostream& o) { write_series_csv(o, *v.series); }));
  }
  return out;
}

Outcome run_koenigs(const Json& p) {
  const double lambda = p["lambda"];
  const ShiftMap map = map_named(p["map"], lambda, p["t0"]);
  const double t0 = p["map"] == "sine" ? 0.0 : static_cast<double>(p["t0"]);
  const ConjugacyResult conj = koenigs_series(map, t0, p["order"]);
  Outcome out;
  Json& r = out.result;
  r["multiplier"] = number(conj.lambda);
  r["residual"] = number(conj.residual);
  r["sigma"] = coeffs(conj.sigma);
  const int iters = p["zeta_iters"];
  if (iters > 0) {
    if (p["map"] != "sine") throw UsageError("zeta_iters needs map = sine");
    const TruncatedSeries other = zeta_iteration(lambda, conj.sigma.order(), iters);
    double gap = 0.0;
    for (int n = 0; n <= conj.sigma.order(); ++n) gap = std::max(gap, std::abs(other[n] - conj.sigma[n]));
    r["zeta_gap"] = number(gap);
  }
  out.files.emplace_back("sigma.csv", to_text([&](std::ostream& o) { write_series_csv(o, conj.sigma); }));
  return out;
}

Outcome run_eigen(const Json& p) {
  const int G = p["G"];
  const double r0 = p["r0"];
  IntegralOperatorSpec spec =
      r0 > 0.0 ? IntegralOperatorSpec{PeriodicFunction::sample([r0](double) { return r0; }, 2 * pi, G),
                                      PeriodicFunction::sample([](double) { return 1.0; }, 2 * pi, G),
                                      std::nullopt}
               : IntegralOperatorSpec::sine_family(p["lambda"], p["m"], G);
  spec.validate();
  const EigenResult e = power_iteration(spec, p["tol"], p["max_iter"]);
  const BoundCheck b = verify_bounds(spec, e);
  Outcome out;
  Json& r = out.result;
  r["kappa"] = number(e.kappa);
  r["residual"] = number(e.residual);
  r["iterations"] = e.iterations;
  r["bound_lo"] = number(b.lo);
  r["bound_hi"] = number(b.hi);
  r["bounds_ok"] = b.ok;
  r["x_at_0"] = number(e.x.samples.front());
  out.files.emplace_back("eigenfunction.csv", to_text([&](std::ostream& o) { write_eigenfunction_csv(o, e.x); }));
  return out;
}

Json fixed_point_json(const FixedPointRecord& f) {
  return Json{{"t", number(f.t_star)},
              {"multiplier", number(f.multiplier)},
              {"class", std::string(to_string(f.cls))}};
}

Outcome run_coexist(const Json& p) {
  CoexistenceConfig c;
  c.lambda = p["lambda"];
  c.m = p["m"];
  c.n = p["n"];
  c.G = p["G"];
  c.N = p["N"];
  c.eigen_tol = p["tol"];
  c.eigen_max_iter = p["max_iter"];
  c.orbit_steps = p["orbit_steps"];
  const CoexistenceReport rep = run_coexistence(c);

  Outcome out;
  Json& r = out.result;
  r["kappa"] = number(rep.eigen.kappa);
  r["kappa_residual"] = number(rep.eigen.residual);
  r["kappa_bounds"] = Json::array({number(rep.kappa_lo), number(rep.kappa_hi)});
  r["kappa_in_bounds"] = rep.kappa_in_bounds;
  r["expansive_record"] = fixed_point_json(rep.expansive);
  r["conjugacy_residual"] = number(rep.conjugacy_residual);
  r["y0"] = number(rep.y0);
  r["w_inf"] = number(rep.w.w_inf);
  r["w_tail_gap"] = number(rep.w.tail_gap);
  r["w_converged"] = rep.w.converged;
  r["cross_recursion_gap"] = number(rep.cross_gap);
  r["omega_bound"] = number(rep.omega);
  r["bound_satisfied"] = rep.bound_satisfied;
  r["omega_below_one"] = rep.omega_below_one;
  r["nonvanishing"] = rep.nonvanishing;
  r["branch_condition"] = rep.branch_condition;
  r["pq_satisfied"] = rep.pq_satisfied;
  if (rep.contractive) {
    Json cr = fixed_point_json(rep.contractive->record);
    cr["t_closed_form"] = number(rep.contractive->t_closed_form);
    cr["multiplier_closed_form"] = number(rep.contractive->multiplier_closed_form);
    r["contractive_record"] = cr;
  } else {
    r["contractive_record"] = nullptr;
  }
  r["flags"] = rep.flags;
  out.files.emplace_back("eigenfunction.csv", to_text([&](std::ostream& o) { write_eigenfunction_csv(o, rep.eigen.x); }));
  out.files.emplace_back("w.csv", to_text([&](std::ostream& o) { write_w_csv(o, rep.w); }));
  out.files.emplace_back("orbit.csv", to_text([&](std::ostream& o) { write_orbit_csv(o, rep.orbit); }));
  return out;
}

Outcome run_steps(const Json& p) {
  const double lambda = p["lambda"];
  const double tau = p["tau"];
  const double y0 = p["y0"];
  const int depth = p["depth"];
  const int steps = p["steps"];
  const PantographForm form = PantographForm::constant(p["a0"], p["b0"], p["g0"], lambda, 12);
  const MatchResult m = match_initial(form, tau, y0, depth, steps);
  const double K = coefficient_bound(form, tau);
  const auto rows = jet_comparison(m.solution, form, y0, p["n_max"]);

  Outcome out;
  Json& r = out.result;
  r["c_minus"] = number(m.c_minus);
  r["c_plus"] = number(m.c_plus);
  r["residual"] = number(m.residual);
  r["lambda_minus"] = number(m.solution.lambda_minus);
  r["lambda_plus"] = number(m.solution.lambda_plus);
  r["richardson_gap"] = number(m.solution.richardson_gap);
  r["gronwall_K"] = number(K);
  r["gronwall_ok"] = gronwall_check(m.solution, K);
  Json jets = Json::array();
  for (const auto& row : rows) {
    jets.push_back(Json{{"n", row.n},
                        {"fitted_coeff", number(row.fitted_coeff)},
                        {"recursion_coeff", number(row.recursion_coeff)},
                        {"gap", number(row.gap)},
                        {"noise_floor", row.noise_floor}});
  }
  r["jets"] = jets;
  out.files.emplace_back("solution.csv", to_text([&](std::ostream& o) { write_solution_csv(o, m.solution); }));
  return out;
}

Outcome run_rotation(const Json& p) {
  const std::string kind = p["map"];
  const double c = p["c"];
  ShiftMap map = kind == "rigid" ? ShiftMap(GenericMap{[c](double t) { return t + c; }, [](double) { return 1.0; }})
                 : kind == "sine" ? ShiftMap(SineShift{p["lambda"], c})
                                  : throw UsageError("map must be 'rigid' or 'sine', got '" + kind + "'");
  const RotationEstimate est = rotation_number(map, p["period"], p["t0"], p["n_iter"]);
  Outcome out;
  out.result["omega"] = number(est.omega);
  out.result["error_bar"] = number(est.error_bar);
  return out;
}

Outcome run_pn(const Json& p) {
  const int n = p["n"];
  const IndexedPolynomial& poly = build_pn(n, p["cap"]);
  Outcome out;
  out.result["n"] = n;
  out.result["terms"] = poly.terms().size();
  out.result["polynomial"] = poly.render();
  out.text = poly.render() + "\n";
  return out;
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> all = {
      {"classify",
       "Analytic / non-analytic verdict at a fixed point of the time shift",
       {{"a0", Kind::Real, 1.0, "constant coefficient of x(t)"},
        {"b0", Kind::Real, 1.0, "constant coefficient of x(eta(t))"},
        {"h0", Kind::Real, 0.0, "constant forcing"},
        {"a_jet", Kind::RealList, Json::array(), "jet of a about t0 (overrides a0)"},
        {"b_jet", Kind::RealList, Json::array(), "jet of b about t0 (overrides b0)"},
        {"h_jet", Kind::RealList, Json::array(), "jet of h about t0 (overrides h0)"},
        {"lambda", Kind::Real, 2.0, "multiplier of the shift"},
        {"map", Kind::Text, "affine", "affine: t0 + lambda (t - t0); sine: t + (lambda - 1) sin t"},
        {"t0", Kind::Real, 0.0, "fixed point"},
        {"y0", Kind::Real, 1.0, "prescribed value x(t0)"},
        {"order", Kind::Integer, 64, "jet order"},
        {"n_max", Kind::Integer, 512, "longest w sequence"},
        {"w_tol", Kind::Real, 1e-12, "tail tolerance for w_inf"}},
       run_classify},
      {"koenigs",
       "Linearizing conjugacy at a fixed point",
       {{"map", Kind::Text, "sine", "sine or affine"},
        {"lambda", Kind::Real, 7.0, "multiplier"},
        {"t0", Kind::Real, 0.0, "fixed point (affine only)"},
        {"order", Kind::Integer, 30, "series order"},
        {"zeta_iters", Kind::Integer, 0, "also run the fixed-point route and report the gap"}},
       run_koenigs},
      {"eigen",
       "Positive periodic eigenfunction of the window-integral operator",
       {{"lambda", Kind::Real, 7.0, "sine family parameter"},
        {"m", Kind::Integer, 2, "delay branch"},
        {"r0", Kind::Real, 0.0, "constant delay instead of the sine family when > 0"},
        {"G", Kind::Integer, 1024, "grid size, power of two"},
        {"tol", Kind::Real, 1e-12, "power iteration tolerance"},
        {"max_iter", Kind::Integer, 20000, "power iteration budget"}},
       run_eigen},
      {"coexist",
       "Analytic and non-analytic points of one periodic solution",
       {{"lambda", Kind::Real, 7.4, "sine family parameter"},
        {"m", Kind::Integer, 2, "delay branch"},
        {"n", Kind::Integer, 1, "branch searched for a contractive point"},
        {"G", Kind::Integer, 1024, "grid size"},
        {"N", Kind::Integer, 200, "w sequence length"},
        {"tol", Kind::Real, 1e-12, "power iteration tolerance"},
        {"max_iter", Kind::Integer, 20000, "power iteration budget"},
        {"orbit_steps", Kind::Integer, 4, "forward orbit length in orbit.csv"}},
       run_coexist},
      {"steps",
       "Smooth non-analytic solutions by the method of steps",
       {{"a0", Kind::Real, -0.5, "alpha"},
        {"b0", Kind::Real, 0.3, "beta"},
        {"g0", Kind::Real, 0.0, "gamma"},
        {"lambda", Kind::Real, 2.0, "advance factor"},
        {"tau", Kind::Real, 0.5, "outer edge of the data intervals"},
        {"y0", Kind::Real, 1.0, "prescribed y(0)"},
        {"depth", Kind::Integer, kDefaultDepth, "number of layers"},
        {"steps", Kind::Integer, kDefaultStepsPerLayer, "RK4 steps per layer"},
        {"n_max", Kind::Integer, 3, "highest jet compared"}},
       run_steps},
      {"rotation",
       "Rotation number of a circle-map lift",
       {{"map", Kind::Text, "rigid", "rigid: t + c; sine: t + (lambda - 1) sin t + c"},
        {"c", Kind::Real, 0.5, "shift"},
        {"lambda", Kind::Real, 1.5, "sine family parameter"},
        {"period", Kind::Real, 1.0, "lift period"},
        {"t0", Kind::Real, 0.0, "start of the orbit"},
        {"n_iter", Kind::Integer, 1000000, "orbit length"}},
       run_rotation},
      {"pn",
       "Polynomial P_n in the partial-derivative symbols",
       {{"n", Kind::Integer, 1, "index"}, {"cap", Kind::Integer, kDefaultPnCap, "largest n allowed"}},
       run_pn},
  };
  return all;
}

Json parse_flag(const ParamSpec& spec, const std::string& text) {
  const auto real = [&](const std::string& s) {
    const char* b = s.c_str();
    char* e = nullptr;
    const double v = std::strtod(b, &e);
    if (e == b || *e != '\0') throw UsageError("--" + spec.name + ": not a number: '" + s + "'");
    return v;
  };
  switch (spec.kind) {
    case Kind::Real:
      return real(text);
    case Kind::Integer: {
      const char* b = text.c_str();
      char* e = nullptr;
      const long v = std::strtol(b, &e, 10);
      if (e == b || *e != '\0') throw UsageError("--" + spec.name + ": not an integer: '" + text + "'");
      return v;
    }
    case Kind::Text:
      return text;
    case Kind::RealList: {
      Json list = Json::array();
      std::stringstream in(text);
      std::string item;
      while (std::getline(in, item, ',')) list.push_back(real(item));
      return list;
    }
  }
  return nullptr;
}

Json resolve_params(const Command& cmd, const Json& given) {
  if (!given.is_object()) throw UsageError("config must be a JSON object");
  Json out = Json::object();
  for (const auto& p : cmd.params) out[p.name] = p.default_value;
  for (const auto& [key, value] : given.items()) {
    const auto it = std::find_if(cmd.params.begin(), cmd.params.end(),
                                 [&](const ParamSpec& p) { return p.name == key; });
    if (it == cmd.params.end()) throw UsageError("unknown key '" + key + "' for " + cmd.name);
    bool ok = false;
    switch (it->kind) {
      case Kind::Real:
        ok = value.is_number();
        break;
      case Kind::Integer:
        ok = value.is_number_integer();
        break;
      case Kind::Text:
        ok = value.is_string();
        break;
      case Kind::RealList:
        ok = value.is_array() &&
             std::all_of(value.begin(), value.end(), [](const Json& v) { return v.is_number(); });
        break;
    }
    if (!ok) throw UsageError("key '" + key + "' has the wrong type");
    out[key] = it->kind == Kind::Real ? Json(value.get<double>()) : value;
  }
  return out;
}

}  // namespace shiftlab::cli
