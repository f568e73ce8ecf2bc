// Python bindings. Structured results cross the boundary as JSON text and are
// decoded on the Python side, so the C++ serializers define one schema for both.

#include <pdsg/experiments.hpp>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace pdsg;

namespace {

ExperimentConfig make_config(std::uint64_t seed, bool small, std::size_t T, double eps,
                             std::vector<double> sigmas, std::vector<std::string> schedules, unsigned threads) {
  ExperimentConfig c;
  if (small) c.make_small();
  c.seed = seed;
  c.T = T;
  c.eps = eps;
  c.sigmas = std::move(sigmas);
  if (!c.sigmas.empty()) c.sigma = c.sigmas.front();
  c.schedules = std::move(schedules);
  c.threads = threads;
  return c;
}

std::string run_json(const ProblemInstance& inst, const Schedule& schedule, const std::string& mode, std::size_t T,
                     const std::string& criterion, double eps, std::uint64_t seed, bool records) {
  RunOptions opt;
  opt.mode = parse_run_mode(mode);
  opt.T = T;
  opt.solver.seed = seed;
  if (!criterion.empty()) opt.stop = stopping(criterion, eps);
  for (auto c : all_criteria()) opt.first_hits.push_back({c, eps});
  RunResult r;
  {
    py::gil_scoped_release release;
    r = run(inst, schedule, opt);
  }
  json j = run_summary_to_json(r);
  j["iterate_norms"] = r.iterate_norms;
  if (r.state) j["x"] = vector_to_json(r.state->x);
  if (records) {
    json recs = json::array();
    for (const auto& rec : r.records) recs.push_back(record_to_json(rec));
    j["records"] = recs;
  }
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Primal-dual subgradient methods with certificates";

  py::class_<Schedule>(m, "Schedule")
      .def_static("uniform", &Schedule::uniform, py::arg("mu"), py::arg("beta_bar") = 0.0)
      .def_static("linear", &Schedule::linear, py::arg("mu"), py::arg("beta_bar") = 0.0)
      .def_static("poly", &Schedule::poly, py::arg("p"), py::arg("mu"), py::arg("beta_bar") = 0.0)
      .def_static("optimized", &Schedule::optimized, py::arg("mu"), py::arg("beta_bar") = 0.0,
                  py::arg("lambda0") = 1.0)
      .def_static("smooth", &Schedule::smooth, py::arg("mu"), py::arg("L1"))
      .def_static("capped", &Schedule::capped, py::arg("mu"), py::arg("L1"))
      .def_static("explicit", &Schedule::explicit_alphas, py::arg("alphas"), py::arg("mu"),
                  py::arg("beta_bar") = 0.0, py::arg("lambda0") = 1.0)
      .def_static("from_name", &make_schedule, py::arg("name"), py::arg("mu"), py::arg("L1") = 0.0,
                  py::arg("beta_bar") = 0.0)
      .def_property_readonly("name", &Schedule::name)
      .def_property_readonly("mu", &Schedule::mu)
      .def_property_readonly("beta_bar", &Schedule::beta_bar)
      .def("prefix",
           [](const Schedule& s, std::size_t T) {
             std::vector<double> a, l;
             for (const auto& t : s.prefix(T)) {
               a.push_back(t.alpha);
               l.push_back(t.lambda);
             }
             return py::make_tuple(a, l);
           },
           py::arg("T"), "(alphas, lambdas) for the first T terms")
      .def("rate_bound", [](const Schedule& s, std::size_t T, double L0_sq, double C0) { return rate_bound(s, T, L0_sq, C0); },
           py::arg("T"), py::arg("L0_sq") = 1.0, py::arg("C0") = 0.0)
      .def("__repr__", [](const Schedule& s) { return "<Schedule " + s.name() + ">"; });

  m.def("lambda_from_alpha",
        [](const std::vector<double>& a, double lambda0, double beta_bar, double mu) {
          return lambda_from_alpha(a, lambda0, beta_bar, mu);
        },
        py::arg("alphas"), py::arg("lambda0"), py::arg("beta_bar"), py::arg("mu"));
  m.def("alpha_from_lambda",
        [](const std::vector<double>& l, double beta_bar, double mu) { return alpha_from_lambda(l, beta_bar, mu); },
        py::arg("lambdas"), py::arg("beta_bar"), py::arg("mu"));
  m.def("divergence_horizon", [](const Schedule& s, double L1) { return divergence_horizon(s, L1); },
        py::arg("schedule"), py::arg("L1"));
  m.def("theorem2_rhs",
        [](double wa, double wt, double L0_sq, double C0) { return theorem2_rhs(wa, wt, 0.0, L0_sq, LogValue::from_double(C0)); },
        py::arg("weight_alpha"), py::arg("weight_total"), py::arg("L0_sq"), py::arg("C0") = 0.0);
  m.def("prop1_rhs", &prop1_rhs, py::arg("tau_sl"), py::arg("h_sl_gap"), py::arg("rate"));
  m.def("eigen_extremes",
        [](const Matrix& S) {
          const auto e = eigen_extremes(S);
          return py::make_tuple(e.min, e.max);
        },
        py::arg("S"));

  py::class_<ProblemInstance>(m, "Instance")
      .def_readonly("name", &ProblemInstance::name)
      .def_readonly("x0", &ProblemInstance::x0)
      .def_property_readonly("n", &ProblemInstance::n)
      .def_property_readonly("m", &ProblemInstance::m)
      .def_property_readonly("mu", [](const ProblemInstance& i) { return i.constants.mu; })
      .def_property_readonly("L1", [](const ProblemInstance& i) { return i.constants.L1; })
      .def_property_readonly("L0_sq", [](const ProblemInstance& i) { return i.constants.L0_sq; })
      .def_property_readonly("x_opt", [](const ProblemInstance& i) { return i.refs.x_opt; })
      .def_property_readonly("p_star", [](const ProblemInstance& i) { return i.refs.p_star; })
      .def("objective_value", &ProblemInstance::objective_value, py::arg("x"))
      .def("feasible", &ProblemInstance::feasible, py::arg("x"))
      .def("to_json", [](const ProblemInstance& i) { return instance_to_json(i).dump(); })
      .def_static("from_json", [](const std::string& s) { return instance_from_json(json::parse(s)); })
      .def("__repr__", [](const ProblemInstance& i) { return "<Instance " + i.name + " n=" + std::to_string(i.n()) + ">"; });

  m.def("gen_l1_ls", &gen_l1_ls, py::arg("m"), py::arg("n"), py::arg("sigma"), py::arg("seed"),
        py::arg("a_scale") = 1.0);
  m.def("toy_divergent", &toy_divergent);
  m.def("gen_quadratic", &gen_quadratic, py::arg("n"), py::arg("cond"), py::arg("seed"));
  m.def("gen_constrained", &gen_constrained, py::arg("n"), py::arg("m_constraints"), py::arg("seed"));

  m.def("_run", &run_json, py::arg("instance"), py::arg("schedule"), py::arg("mode") = "primal", py::arg("T") = 1000,
        py::arg("criterion") = "", py::arg("eps") = 0.05, py::arg("seed") = 0, py::arg("records") = false);

  m.def("_fig1",
        [](std::uint64_t seed, bool small, std::size_t T, unsigned threads) {
          py::gil_scoped_release release;
          const auto r = fig1(make_config(seed, small, T, 0.05, {}, {}, threads));
          std::ostringstream csv;
          write_fig1_csv(csv, r);
          json j{{"bounds_hold", r.bounds_hold},
                 {"optimized_smallest_rhs", r.optimized_smallest_rhs},
                 {"slowest_final", r.slowest_final},
                 {"csv", csv.str()}};
          return j.dump();
        },
        py::arg("seed") = 1, py::arg("small") = true, py::arg("T") = 0, py::arg("threads") = 0);
  m.def("_table1",
        [](std::uint64_t seed, bool small, double eps, std::vector<std::string> schedules, unsigned threads) {
          py::gil_scoped_release release;
          return table1_to_json(table1(make_config(seed, small, 0, eps, {}, std::move(schedules), threads))).dump();
        },
        py::arg("seed") = 1, py::arg("small") = true, py::arg("eps") = 0.05,
        py::arg("schedules") = std::vector<std::string>{}, py::arg("threads") = 0);
  m.def("_divergence",
        [](std::uint64_t seed, bool small, std::vector<double> sigmas, unsigned threads) {
          py::gil_scoped_release release;
          return divergence_to_json(divergence(make_config(seed, small, 0, 0.05, std::move(sigmas), {}, threads))).dump();
        },
        py::arg("seed") = 1, py::arg("small") = false, py::arg("sigmas") = std::vector<double>{},
        py::arg("threads") = 0);
  m.def("_equivalence",
        [](std::size_t T, unsigned threads) {
          py::gil_scoped_release release;
          return equivalence_to_json(equivalence(make_config(1, false, T, 0.05, {}, {}, threads))).dump();
        },
        py::arg("T") = 1000, py::arg("threads") = 0);
}
