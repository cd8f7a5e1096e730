#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <numbers>

#include "shiftlab/error.hpp"
#include "shiftlab/koenigs.hpp"
#include "shiftlab/kreigen.hpp"
#include "shiftlab/nondegeneracy.hpp"
#include "shiftlab/pantograph.hpp"
#include "shiftlab/pipeline.hpp"
#include "shiftlab/series.hpp"
#include "shiftlab/shiftmap.hpp"
#include "shiftlab/stepsim.hpp"

namespace py = pybind11;
using namespace shiftlab;

namespace {

std::vector<double> to_list(const TruncatedSeries& s) { return {s.coeffs().begin(), s.coeffs().end()}; }

ShiftMap map_of(const std::string& kind, double lambda, double offset) {
  if (kind == "affine") return ShiftMap(Affine{lambda, offset});
  if (kind == "sine") return ShiftMap(SineShift{lambda, offset});
  throw Error(ErrorCode::InvalidArgument, "map must be 'affine' or 'sine', got '" + kind + "'");
}

py::dict point_dict(const FixedPointRecord& r) {
  py::dict d;
  d["t"] = r.t_star;
  d["multiplier"] = r.multiplier;
  d["class"] = std::string(to_string(r.cls));
  return d;
}

py::dict coexistence(double lambda, int m, int n, int G, int N, int orbit_steps) {
  CoexistenceConfig cfg;
  cfg.lambda = lambda;
  cfg.m = m;
  cfg.n = n;
  cfg.G = G;
  cfg.N = N;
  cfg.orbit_steps = orbit_steps;
  const auto r = run_coexistence(cfg);
  py::dict d;
  d["kappa"] = r.eigen.kappa;
  d["kappa_in_bounds"] = r.kappa_in_bounds;
  d["eigen_residual"] = r.eigen.residual;
  d["expansive"] = point_dict(r.expansive);
  d["contractive"] = r.contractive ? py::object(point_dict(r.contractive->record)) : py::none();
  d["y0"] = r.y0;
  d["w"] = r.w.w;
  d["w_inf"] = r.w.w_inf;
  d["cross_gap"] = r.cross_gap;
  d["omega"] = r.omega;
  d["bound_satisfied"] = r.bound_satisfied;
  d["pq_satisfied"] = r.pq_satisfied;
  d["nonvanishing"] = r.nonvanishing;
  d["flags"] = r.flags;
  py::list orbit;
  for (const auto& p : r.orbit) orbit.append(py::make_tuple(p.k, p.t, std::string(to_string(p.label))));
  d["orbit"] = orbit;
  return d;
}

py::dict match(const PantographForm& form, double tau, double y0, int n_max) {
  const auto m = match_initial(form, tau, y0);
  py::dict d;
  d["c_minus"] = m.c_minus;
  d["c_plus"] = m.c_plus;
  d["residual"] = m.residual;
  d["lambda_minus"] = m.solution.lambda_minus;
  d["lambda_plus"] = m.solution.lambda_plus;
  d["gronwall"] = gronwall_check(m.solution, coefficient_bound(form, tau));
  py::list jets;
  for (const auto& row : jet_comparison(m.solution, form, y0, n_max)) {
    jets.append(py::make_tuple(row.n, row.fitted_coeff, row.recursion_coeff));
  }
  d["jets"] = jets;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Analyticity diagnostics for equations with a time shift";

  static py::exception<Error> error_type(mod, "ShiftlabError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const auto cls = py::reinterpret_borrow<py::object>(error_type.ptr());
      py::object exc = cls(std::string(to_string(e.code())) + ": " + e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<TruncatedSeries>(mod, "TruncatedSeries")
      .def(py::init<double, std::vector<double>>(), py::arg("center"), py::arg("coeffs"))
      .def_property_readonly("center", &TruncatedSeries::center)
      .def_property_readonly("order", &TruncatedSeries::order)
      .def_property_readonly("coeffs", &to_list)
      .def("__call__", &TruncatedSeries::evaluate)
      .def("__getitem__", &TruncatedSeries::operator[])
      .def("__repr__", [](const TruncatedSeries& s) {
        return "<TruncatedSeries center=" + std::to_string(s.center()) +
               " order=" + std::to_string(s.order()) + ">";
      });
  mod.def("compose", &compose, py::arg("outer"), py::arg("inner"));
  mod.def("revert", &revert, py::arg("series"));
  mod.def(
      "radius_estimate",
      [](const TruncatedSeries& s, int window) { return radius_estimate(s, window).radius_estimate; },
      py::arg("series"), py::arg("window"));

  py::class_<PantographForm>(mod, "PantographForm")
      .def(py::init([](std::vector<double> alpha, std::vector<double> beta, std::vector<double> gamma,
                       double lambda) {
             return PantographForm{TruncatedSeries(0, std::move(alpha)), TruncatedSeries(0, std::move(beta)),
                                   TruncatedSeries(0, std::move(gamma)), lambda};
           }),
           py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("lam"))
      .def_static("constant", &PantographForm::constant, py::arg("a0"), py::arg("b0"), py::arg("g0"),
                  py::arg("lam"), py::arg("order"))
      .def_property_readonly("lam", [](const PantographForm& f) { return f.lambda; });

  mod.def(
      "w_sequence", [](const PantographForm& f, double y0, int N) { return w_sequence(f, y0, N).w; },
      py::arg("form"), py::arg("y0"), py::arg("N"));
  mod.def(
      "taylor_coefficients",
      [](const PantographForm& f, double y0, int N) { return to_list(taylor_coefficients(f, y0, N)); },
      py::arg("form"), py::arg("y0"), py::arg("N"));
  mod.def("closed_form_oracle_simple", &closed_form_oracle_simple, py::arg("a0"), py::arg("b0"),
          py::arg("lam"), py::arg("x0"), py::arg("N"));
  mod.def(
      "classify_point",
      [](double a0, double b0, double h0, double lambda, double y0) {
        const LocalLinearDDE dde{TruncatedSeries::constant(0, a0, 64), TruncatedSeries::constant(0, b0, 64),
                                 TruncatedSeries::constant(0, h0, 64), Affine{lambda, 0.0}, 0.0};
        const auto v = classify_point(dde, y0);
        py::dict d;
        d["verdict"] = std::string(to_string(v.cls));
        d["w_inf"] = v.w_inf ? py::object(py::float_(*v.w_inf)) : py::none();
        d["series"] = v.series ? py::object(py::cast(to_list(*v.series))) : py::none();
        return d;
      },
      "Verdict at the fixed point 0 of t -> lam t for constant coefficients", py::arg("a0"),
      py::arg("b0"), py::arg("h0"), py::arg("lam"), py::arg("y0"));

  mod.def(
      "koenigs",
      [](const std::string& kind, double lambda, double t0, int order) {
        const auto k = koenigs_series(map_of(kind, lambda, 0.0), t0, order);
        return py::make_tuple(to_list(k.sigma), k.residual);
      },
      "(sigma coefficients, conjugacy residual)", py::arg("map"), py::arg("lam"), py::arg("t0"),
      py::arg("order"));
  mod.def(
      "zeta_iteration",
      [](double lambda, int order, int iters) { return to_list(zeta_iteration(lambda, order, iters)); },
      py::arg("lam"), py::arg("order"), py::arg("iters"));

  mod.def(
      "eigen_constant_delay",
      [](double r0, int G, double tol, int max_iter) {
        const IntegralOperatorSpec spec{
            PeriodicFunction::sample([r0](double) { return r0; }, 2 * std::numbers::pi, G),
            PeriodicFunction::sample([](double) { return 1.0; }, 2 * std::numbers::pi, G), std::nullopt};
        const auto e = power_iteration(spec, tol, max_iter);
        return py::make_tuple(e.kappa, e.x.samples, e.residual);
      },
      "(kappa, eigenfunction samples, residual)", py::arg("r0"), py::arg("G") = 1024,
      py::arg("tol") = 1e-12, py::arg("max_iter") = 20000);
  mod.def(
      "eigen_sine",
      [](double lambda, int m, int G, double tol, int max_iter) {
        const auto e = power_iteration(IntegralOperatorSpec::sine_family(lambda, m, G), tol, max_iter);
        return py::make_tuple(e.kappa, e.x.samples, e.residual);
      },
      "(kappa, eigenfunction samples, residual)", py::arg("lam"), py::arg("m"), py::arg("G") = 1024,
      py::arg("tol") = 1e-12, py::arg("max_iter") = 20000);

  mod.def("run_coexistence", &coexistence, py::arg("lam") = 7.4, py::arg("m") = 2, py::arg("n") = 1,
          py::arg("G") = 1024, py::arg("N") = 200, py::arg("orbit_steps") = 4);
  mod.def("omega_bound", &omega_bound, py::arg("lam"));

  mod.def("match_initial", &match, py::arg("form"), py::arg("tau"), py::arg("y0"), py::arg("n_max") = 3);

  mod.def(
      "rotation_number",
      [](const std::string& kind, double param, double period, double t0, long n_iter) {
        if (kind == "rigid") {
          const ShiftMap rigid(GenericMap{[param](double t) { return t + param; }, [](double) { return 1.0; }});
          return rotation_number(rigid, period, t0, n_iter).omega;
        }
        return rotation_number(map_of(kind, param, 0.0), period, t0, n_iter).omega;
      },
      "kind 'rigid' (param = shift) or 'sine' (param = lambda)", py::arg("kind"), py::arg("param"),
      py::arg("period"), py::arg("t0") = 0.0, py::arg("n_iter") = 100000);

  mod.def(
      "pn", [](int n) { return build_pn(n).render(); }, py::arg("n"));
}
