#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "chemomass/comparison.hpp"
#include "chemomass/errors.hpp"
#include "chemomass/experiments.hpp"
#include "chemomass/primal_solver.hpp"
#include "chemomass/radial_core.hpp"
#include "chemomass/transformed_solver.hpp"

namespace py = pybind11;
using namespace chemomass;

namespace {

// Column name -> list of values, in the CSV column order.
py::dict trajectory_columns(const TrajectoryRecord& rec) {
  static const std::pair<const char*, double TrajectoryRow::*> fields[] = {
      {"t", &TrajectoryRow::t},
      {"sup_u", &TrajectoryRow::sup_u},
      {"sup_w", &TrajectoryRow::sup_w},
      {"mass_u", &TrajectoryRow::mass_u},
      {"mass_w", &TrajectoryRow::mass_w},
      {"u_at_0", &TrajectoryRow::u_at_0},
      {"U_slope_0", &TrajectoryRow::U_slope_0},
      {"energy_lhs", &TrajectoryRow::energy_lhs},
      {"energy_rhs", &TrajectoryRow::energy_rhs},
      {"sup_U_over_xi", &TrajectoryRow::sup_U_over_xi},
      {"min_dU", &TrajectoryRow::min_dU},
      {"memory_norm", &TrajectoryRow::memory_norm},
  };
  py::dict d;
  for (const auto& [name, field] : fields) d[name] = rec.column(field);
  return d;
}

template <class F>
std::string to_text(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radial chemotaxis with indirect signal production: solvers, barriers and mass sweeps.";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<CompatibilityError>(m, "CompatibilityError", PyExc_ValueError);
  py::register_exception<RegimeError>(m, "RegimeError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);

  m.attr("pi") = kPi;

  // ---------------------------------------------------------------- core types
  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<double, double, double>(), py::arg("delta") = 1.0, py::arg("tau") = 1.0,
           py::arg("m") = 4.0 * kPi)
      .def_readwrite("delta", &ModelParams::delta)
      .def_readwrite("tau", &ModelParams::tau)
      .def_readwrite("m", &ModelParams::m)
      .def_property_readonly("critical_mass", &ModelParams::critical_mass)
      .def("with_mass", &ModelParams::with_mass)
      .def("__repr__", [](const ModelParams& p) {
        std::ostringstream os;
        os << "ModelParams(delta=" << p.delta << ", tau=" << p.tau << ", m=" << p.m << ")";
        return os.str();
      });

  py::class_<RadialGrid, std::shared_ptr<RadialGrid>>(m, "RadialGrid")
      .def_static("uniform", [](std::size_t n) { return std::const_pointer_cast<RadialGrid>(RadialGrid::uniform(n)); })
      .def_static("from_faces",
                  [](std::vector<double> f) { return std::const_pointer_cast<RadialGrid>(RadialGrid::from_faces(f)); })
      .def_static("two_zone",
                  [](double r_split, double h_in, double h_out) {
                    return std::const_pointer_cast<RadialGrid>(RadialGrid::two_zone(r_split, h_in, h_out));
                  })
      .def("__len__", &RadialGrid::size)
      .def_property_readonly("faces", [](const RadialGrid& g) { return std::vector<double>(g.faces().begin(), g.faces().end()); })
      .def_property_readonly("centers",
                             [](const RadialGrid& g) { return std::vector<double>(g.centers().begin(), g.centers().end()); })
      .def_property_readonly("areas", [](const RadialGrid& g) { return std::vector<double>(g.areas().begin(), g.areas().end()); });

  py::class_<RadialProfile>(m, "RadialProfile")
      .def(py::init([](std::shared_ptr<RadialGrid> g, std::vector<double> v) {
             return RadialProfile(std::move(g), std::move(v));
           }),
           py::arg("grid"), py::arg("values"))
      .def_static("constant", [](std::shared_ptr<RadialGrid> g, double c) { return RadialProfile::constant(g, c); })
      .def_property_readonly("grid", [](const RadialProfile& f) { return std::const_pointer_cast<RadialGrid>(f.grid_ptr()); })
      .def_property_readonly("values", [](const RadialProfile& f) { return std::vector<double>(f.values().begin(), f.values().end()); })
      .def("__len__", &RadialProfile::size)
      .def("at", &RadialProfile::at)
      .def("max", &RadialProfile::max)
      .def("min", &RadialProfile::min)
      .def("integral", &integrate_disk);

  py::class_<XiGrid>(m, "XiGrid")
      .def(py::init<std::vector<double>>())
      .def_static("uniform", &XiGrid::uniform)
      .def_static("graded", &XiGrid::graded, py::arg("xi_min"), py::arg("q"), py::arg("h_max"))
      .def("__len__", &XiGrid::size)
      .def_property_readonly("nodes", [](const XiGrid& x) { return std::vector<double>(x.nodes().begin(), x.nodes().end()); });

  m.def("mass_function", &mass_function, py::arg("u"), py::arg("xig"),
        "U(xi) = int_0^sqrt(xi) r u dr at every node of xig.");
  m.def("integrate_disk", &integrate_disk);
  m.def("mu_closed_form", &mu_closed_form, py::arg("p"), py::arg("w0_mass"), py::arg("t"));
  m.def("hold_weights", [](double k, double dt) {
    const auto w = hold_weights(k, dt);
    return py::make_tuple(w.old_w, w.new_w);
  });

  // ---------------------------------------------------------------- trajectories
  py::class_<PrimalConfig>(m, "PrimalConfig")
      .def(py::init([](double dt, double t_end, double record_every, double blowup, double dt_start) {
             return PrimalConfig{dt, t_end, record_every, blowup, dt_start};
           }),
           py::arg("dt") = 1e-3, py::arg("t_end") = 10.0, py::arg("record_every") = 0.1,
           py::arg("blowup_threshold") = 0.0, py::arg("dt_start") = 0.0)
      .def_readwrite("dt", &PrimalConfig::dt)
      .def_readwrite("t_end", &PrimalConfig::t_end)
      .def_readwrite("record_every", &PrimalConfig::record_every)
      .def_readwrite("blowup_threshold", &PrimalConfig::blowup_threshold)
      .def_readwrite("dt_start", &PrimalConfig::dt_start);

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("blew_up", &TrajectoryRecord::blew_up)
      .def_readonly("steps", &TrajectoryRecord::steps)
      .def_property_readonly("t_end", &TrajectoryRecord::t_end)
      .def("__len__", [](const TrajectoryRecord& r) { return r.rows.size(); })
      .def("columns", &trajectory_columns, "Dict of column name to values, one entry per recorded time.")
      .def("to_csv", [](const TrajectoryRecord& r) { return to_text([&](std::ostream& os) { write_trajectory_csv(os, r); }); });

  py::class_<PrimalState>(m, "PrimalState")
      .def_readonly("t", &PrimalState::t)
      .def_readonly("u", &PrimalState::u)
      .def_readonly("w", &PrimalState::w)
      .def_readonly("v", &PrimalState::v);

  m.def("run_primal", &run_primal, py::arg("u0"), py::arg("w0"), py::arg("p"), py::arg("cfg"),
        py::arg("observer") = PrimalObserver{}, py::arg("energy_p") = 2.0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<OperatorContext>(m, "OperatorContext")
      .def_readonly("p", &OperatorContext::p)
      .def_readonly("kappa0", &OperatorContext::kappa0)
      .def("W0", &OperatorContext::W0_eval);
  m.def("make_context", py::overload_cast<const ModelParams&, const RadialProfile&, const XiGrid&>(&make_context),
        py::arg("p"), py::arg("w0"), py::arg("xig"));

  py::class_<MassState>(m, "MassState")
      .def_readonly("t", &MassState::t)
      .def_readonly("U", &MassState::U)
      .def_readonly("I", &MassState::I);

  m.def("run_transformed", &run_transformed, py::arg("U0"), py::arg("xig"), py::arg("ctx"), py::arg("cfg"),
        py::arg("observer") = MassObserver{}, py::call_guard<py::gil_scoped_release>());

  // ---------------------------------------------------------------- barriers
  py::class_<SubsolutionSpec>(m, "SubsolutionSpec")
      .def_readonly("xi0", &SubsolutionSpec::xi0)
      .def_readonly("b0", &SubsolutionSpec::b0)
      .def_readonly("alpha", &SubsolutionSpec::alpha)
      .def_readonly("t0", &SubsolutionSpec::t0)
      .def_readonly("m", &SubsolutionSpec::m)
      .def_readonly("eta", &SubsolutionSpec::eta)
      .def_readonly("eps", &SubsolutionSpec::eps)
      .def_readonly("c1", &SubsolutionSpec::c1)
      .def("b", &SubsolutionSpec::b)
      .def("a", &SubsolutionSpec::a);

  py::class_<GrowUpConstants>(m, "GrowUpConstants")
      .def_readonly("R", &GrowUpConstants::R)
      .def_readonly("Gamma_u", &GrowUpConstants::Gamma_u)
      .def_readonly("gamma_small", &GrowUpConstants::gamma_small)
      .def_readonly("Gamma_w", &GrowUpConstants::Gamma_w)
      .def_readonly("Gamma0", &GrowUpConstants::Gamma0)
      .def_readonly("alpha_star", &GrowUpConstants::alpha_star)
      .def_readonly("delta_zero_limit", &GrowUpConstants::delta_zero_limit)
      .def_readonly("barrier", &GrowUpConstants::barrier);

  m.def("grow_up_constants", &grow_up_constants, py::arg("m"), py::arg("eta"), py::arg("p"));
  m.def("grow_up_grid", [](const GrowUpConstants& c, std::size_t n_outer) {
    return std::const_pointer_cast<RadialGrid>(grow_up_grid(c, n_outer));
  }, py::arg("constants"), py::arg("n_outer") = 1024);

  py::class_<InitialData>(m, "InitialData")
      .def_readonly("u0", &InitialData::u0)
      .def_readonly("w0", &InitialData::w0);
  m.def("build_grow_up_data",
        [](const GrowUpConstants& c, const ModelParams& p, std::shared_ptr<RadialGrid> g, double eta) {
          return build_grow_up_data(c, p, g, eta);
        },
        py::arg("constants"), py::arg("p"), py::arg("grid"), py::arg("eta"));
  m.def("concentrated_data",
        [](std::shared_ptr<RadialGrid> g, double mass, double radius, double w_ratio) {
          return concentrated_data(g, mass, radius, w_ratio);
        },
        py::arg("grid"), py::arg("m"), py::arg("radius") = 0.3, py::arg("w_ratio") = 0.5);
  m.def("homogeneous_data", [](std::shared_ptr<RadialGrid> g, const ModelParams& p) { return homogeneous_data(g, p); });

  m.def("barrier_value", &ubar_eval, py::arg("spec"), py::arg("xi"), py::arg("t"));
  m.def("barrier_operator",
        [](const SubsolutionSpec& s, const OperatorContext& ctx, double xi, double t) {
          return ubar_parab_numeric(s, ctx, xi, t);
        },
        py::arg("spec"), py::arg("ctx"), py::arg("xi"), py::arg("t"), "P applied to the barrier by finite differences.");

  py::class_<BarrierReport> br(m, "BarrierReport");
  py::enum_<BarrierReport::Region>(br, "Region")
      .value("inner", BarrierReport::Region::inner)
      .value("outer", BarrierReport::Region::outer)
      .value("super", BarrierReport::Region::super);
  br.def_readonly("max_residual", &BarrierReport::max_residual)
      .def_readonly("passed", &BarrierReport::passed)
      .def_readonly("sample_count", &BarrierReport::sample_count)
      .def_readonly("violating_points", &BarrierReport::violating_points)
      .def("to_text", [](const BarrierReport& r) { return to_text([&](std::ostream& os) { write_barrier_report(os, r); }); });

  // std::span arguments arrive as lists, so these take vectors
  m.def("certify_barrier",
        [](BarrierReport::Region region, const SubsolutionSpec& spec, const OperatorContext& ctx,
           const std::vector<double>& xs, const std::vector<double>& ts, double slack) {
          return certify_barrier(region, spec, ctx, xs, ts, slack);
        },
        py::arg("region"), py::arg("spec"), py::arg("ctx"), py::arg("xs"),
        py::arg("ts"), py::arg("slack") = 1e-12);
  m.def("log_samples", &log_samples);
  m.def("linear_samples", &linear_samples);

  // ---------------------------------------------------------------- experiments
  py::enum_<Verdict>(m, "Verdict")
      .value("bounded", Verdict::bounded)
      .value("growing", Verdict::growing)
      .value("undecided", Verdict::undecided);
  m.def("verdict_name", [](Verdict v) { return std::string(to_string(v)); }, "Bounded, Growing or Undecided.");

  py::class_<Classification>(m, "Classification")
      .def_readonly("verdict", &Classification::verdict)
      .def_readonly("growth_rate", &Classification::growth_rate)
      .def_readonly("r2", &Classification::r2)
      .def_readonly("evidence", &Classification::evidence);
  m.def("classify", &boundedness_classifier, py::arg("record"), py::arg("window"));
  m.def("growth_rate_fit", [](std::vector<double> t, std::vector<double> y, double window) {
    const auto f = growth_rate_fit(t, y, window);
    return py::make_tuple(f.alpha_hat, f.intercept, f.r2);
  }, py::arg("t"), py::arg("y"), py::arg("window"), "(alpha_hat, intercept, r2) of log y over the last window.");
  m.def("energy_pass_fraction", &energy_pass_fraction, py::arg("record"), py::arg("rel_tol"));

  py::enum_<DataFamily>(m, "DataFamily")
      .value("homogeneous", DataFamily::homogeneous)
      .value("concentrated", DataFamily::concentrated);

  py::class_<SweepConfig>(m, "SweepConfig")
      .def(py::init<>())
      .def_readwrite("masses", &SweepConfig::masses)
      .def_readwrite("p", &SweepConfig::p)
      .def_readwrite("family", &SweepConfig::family)
      .def_readwrite("horizon", &SweepConfig::horizon)
      .def_readwrite("dt", &SweepConfig::dt)
      .def_readwrite("record_every", &SweepConfig::record_every)
      .def_readwrite("window", &SweepConfig::window)
      .def_readwrite("eta", &SweepConfig::eta)
      .def_readwrite("n", &SweepConfig::n)
      .def_readwrite("n_data", &SweepConfig::n_data)
      .def_readwrite("nxi", &SweepConfig::nxi)
      .def_readwrite("xi_min", &SweepConfig::xi_min)
      .def_readwrite("xi_ratio", &SweepConfig::xi_ratio)
      .def_readwrite("threads", &SweepConfig::threads);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("m", &SweepRow::m)
      .def_readonly("m_over_critical", &SweepRow::m_over_critical)
      .def_readonly("verdict", &SweepRow::verdict)
      .def_readonly("alpha_hat", &SweepRow::alpha_hat)
      .def_readonly("r2", &SweepRow::r2)
      .def_readonly("sup_u_final", &SweepRow::sup_u_final)
      .def_readonly("resolution_warning", &SweepRow::resolution_warning)
      .def_readonly("error", &SweepRow::error);

  m.def("mass_sweep", &mass_sweep, py::arg("cfg"), py::call_guard<py::gil_scoped_release>());
  m.def("sweep_csv", [](const std::vector<SweepRow>& rows, bool timing) {
    return to_text([&](std::ostream& os) { write_sweep_csv(os, rows, timing); });
  }, py::arg("rows"), py::arg("timing") = false);
}
