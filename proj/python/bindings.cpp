#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bwa/bounds.hpp"
#include "bwa/chain.hpp"
#include "bwa/fixtures.hpp"
#include "bwa/harness.hpp"
#include "bwa/io.hpp"
#include "bwa/mcmc.hpp"
#include "bwa/noise.hpp"
#include "bwa/occupation.hpp"
#include "bwa/verify.hpp"
#include "bwa/weights.hpp"

namespace py = pybind11;

namespace {

bwa::FiniteChainSpec make_chain(const std::vector<std::pair<std::vector<double>, double>>& states,
                                const Eigen::MatrixXd& transition, const Eigen::VectorXd& initial,
                                const std::string& name) {
  std::vector<bwa::StatePoint> pts;
  for (const auto& [x, y] : states) pts.push_back(bwa::StatePoint{x, y});
  return bwa::FiniteChainSpec::create(std::move(pts), transition, initial, std::nullopt, name);
}

py::tuple path_arrays(const bwa::Trajectory& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  const auto d = n ? static_cast<Eigen::Index>(t.points.front().x.size()) : 0;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = t.points[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(j)];
    y(i) = t.points[static_cast<std::size_t>(i)].y;
  }
  return py::make_tuple(X, y);
}

bwa::Trajectory trajectory_from(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double y_slack) {
  if (X.rows() != y.size()) throw std::invalid_argument("X and y have different lengths");
  bwa::Trajectory t;
  t.y_slack = y_slack;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::vector<double> x(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) x[static_cast<std::size_t>(j)] = X(i, j);
    t.points.push_back(bwa::StatePoint{std::move(x), y(i)});
  }
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Batched weighted average learning on Markov data";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::domain_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<bwa::FiniteChainSpec>(m, "Chain")
      .def(py::init(&make_chain), py::arg("states"), py::arg("transition"), py::arg("initial"),
           py::arg("name") = "")
      .def_property_readonly("size", &bwa::FiniteChainSpec::size)
      .def_property_readonly("name", &bwa::FiniteChainSpec::name)
      .def_property_readonly("transition", &bwa::FiniteChainSpec::transition)
      .def_property_readonly("initial", &bwa::FiniteChainSpec::initial)
      .def("stationary", [](const bwa::FiniteChainSpec& c) { return bwa::stationary_distribution(c).probabilities; })
      .def("sample_path",
           [](const bwa::FiniteChainSpec& c, std::size_t n, std::uint64_t seed) {
             return path_arrays(bwa::sample_path(c, n, seed));
           },
           py::arg("n"), py::arg("seed"), "Returns (X, y) arrays of the first n observations.")
      .def("occupation",
           [](const bwa::FiniteChainSpec& c, std::uint64_t n, std::uint64_t seed) {
             return bwa::sample_occupation(c, n, seed);
           },
           py::arg("n"), py::arg("seed"))
      .def("to_json", [](const bwa::FiniteChainSpec& c) { return bwa::chain_to_json(c).dump(); });

  py::class_<bwa::ErgodicityCertificate>(m, "Certificate")
      .def_readonly("gamma", &bwa::ErgodicityCertificate::gamma)
      .def_readonly("rho", &bwa::ErgodicityCertificate::rho)
      .def_readonly("B", &bwa::ErgodicityCertificate::B)
      .def_readonly("V", &bwa::ErgodicityCertificate::V);
  m.def("fit_certificate", &bwa::fit_certificate, py::arg("chain"), py::arg("horizon") = 50);
  m.def("effective_sample_size", &bwa::effective_sample_size, py::arg("n"), py::arg("rho"));

  py::class_<bwa::FiniteHypothesisSpace>(m, "Space")
      .def_property_readonly("size", &bwa::FiniteHypothesisSpace::size)
      .def_property_readonly("prior", &bwa::FiniteHypothesisSpace::priors)
      .def_property_readonly("ids", [](const bwa::FiniteHypothesisSpace& s) {
        std::vector<int> ids;
        for (const auto& h : s.hypotheses()) ids.push_back(h.id());
        return ids;
      })
      .def("evaluate", [](const bwa::FiniteHypothesisSpace& s, std::size_t i, const std::vector<double>& x) {
        return s.hypothesis(i)(x);
      });

  py::class_<bwa::Fixture>(m, "Fixture")
      .def_readonly("name", &bwa::Fixture::name)
      .def_readonly("chain", &bwa::Fixture::chain)
      .def_readonly("space", &bwa::Fixture::space);
  m.def("fixture", &bwa::make_fixture, py::arg("name"));
  m.def("fixture_names", &bwa::fixture_names);

  py::class_<bwa::WeightState>(m, "WeightState")
      .def_readonly("alpha", &bwa::WeightState::alpha)
      .def_readonly("ids", &bwa::WeightState::ids)
      .def_readonly("cumulative_loss", &bwa::WeightState::cumulative_loss)
      .def_readonly("steps", &bwa::WeightState::steps);

  m.def(
      "train",
      [](const bwa::FiniteHypothesisSpace& space, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
         double y_slack) { return bwa::train(space, trajectory_from(X, y, y_slack), alpha); },
      py::arg("space"), py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("y_slack") = 0.0);
  m.def(
      "predict",
      [](const bwa::WeightState& s, const std::vector<double>& x, const bwa::FiniteHypothesisSpace& space) {
        return bwa::predict(s, x, space).value;
      },
      py::arg("state"), py::arg("x"), py::arg("space"));
  m.def("normalized_weights", &bwa::normalized_weights, py::arg("state"), py::arg("space"));
  m.def("posterior_masses", &bwa::posterior_masses, py::arg("state"), py::arg("space"));
  m.def(
      "predict_mcmc",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha, const std::vector<double>& x,
         std::size_t grid, std::size_t samples, std::uint64_t seed) {
        const auto family = bwa::grid_affine_family(grid);
        bwa::McmcOptions opt;
        opt.samples = samples;
        opt.seed = seed;
        const auto p = bwa::predict_mcmc(family, trajectory_from(X, y, 0.0), alpha, x, opt);
        return py::make_tuple(p.value, p.mc_error.value_or(0.0), p.acceptance_rate.value_or(0.0));
      },
      py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("x"), py::arg("grid") = 51, py::arg("samples") = 2000,
      py::arg("seed") = 0, "MCMC prediction on the grid affine family; returns (value, mc_error, acceptance).");

  py::class_<bwa::BoundResult>(m, "BoundResult")
      .def_readonly("n_e_required", &bwa::BoundResult::n_e_required)
      .def_readonly("n_required", &bwa::BoundResult::n_required)
      .def_readonly("vacuous", &bwa::BoundResult::vacuous)
      .def_property_readonly("terms", [](const bwa::BoundResult& r) {
        py::dict d;
        for (const auto& t : r.terms) d[py::str(t.name)] = t.value;
        return d;
      });

  auto inputs = [](double eps, double delta, double M, double L, double gamma, double B, double rho, double alpha,
                   double N, double V_eps_quarter, double Xi) {
    bwa::BoundInputs in;
    in.eps = eps;
    in.delta = delta;
    in.M = M;
    in.L = L;
    in.gamma = gamma;
    in.B = B;
    in.rho = rho;
    in.alpha = alpha;
    in.covering = bwa::CoveringModel::fixed(N);
    in.V_eps_quarter = V_eps_quarter;
    in.Xi = Xi;
    return in;
  };
  py::class_<bwa::BoundInputs>(m, "BoundInputs")
      .def(py::init(inputs), py::arg("eps"), py::arg("delta"), py::arg("M") = 1.0, py::arg("L") = 1.0,
           py::arg("gamma") = 1.0, py::arg("B") = 1.0, py::arg("rho") = 0.5, py::arg("alpha") = 0.5,
           py::arg("N") = 1.0, py::arg("V_eps_quarter") = 1.0, py::arg("Xi") = 0.0);
  m.def("lemma1_ne", &bwa::lemma1_ne);
  m.def("lemma2_ne", &bwa::lemma2_ne);
  m.def("theorem2_ne", &bwa::theorem2_ne);
  m.def("theorem4_guarantee", [](const bwa::BoundInputs& in) {
    const auto r = bwa::theorem4_guarantee(in);
    return py::make_tuple(r.bound, r.guarantee_excess);
  });
  m.def("weight_domination_threshold", &bwa::weight_domination_threshold, py::arg("alpha"), py::arg("n"),
        py::arg("eps"), py::arg("V_half"));
  m.def(
      "n_from_ne",
      [](double target, double rho) {
        const auto s = bwa::n_from_ne(target, rho);
        return py::make_tuple(s.n, s.vacuous);
      },
      py::arg("ne_target"), py::arg("rho"), "Returns (n or None, vacuous).");

  m.def(
      "_run_experiment",
      [](const std::string& kind, const std::string& config) {
        const auto cfg = bwa::config_from_json(bwa::json::parse(config));
        const auto report = bwa::run_experiment(bwa::parse_experiment_kind(kind), cfg);
        return py::make_tuple(bwa::report_csv(report), bwa::summary_json(report).dump());
      },
      py::arg("kind"), py::arg("config_json"));
  m.def(
      "_bound_table",
      [](const std::string& config) {
        return bwa::bound_table_json(bwa::run_bound_table(bwa::config_from_json(bwa::json::parse(config)))).dump();
      },
      py::arg("config_json"));
  m.def(
      "_verify",
      [](const std::vector<int>& only) {
        std::ostringstream os;
        const auto results = bwa::verify::run_acceptance(os, std::set<int>(only.begin(), only.end()));
        std::vector<py::dict> out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["seconds"] = r.seconds;
          d["detail"] = r.detail;
          out.push_back(d);
        }
        return out;
      },
      py::arg("only"));
}
