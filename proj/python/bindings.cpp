#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdirac/clifford.hpp"
#include "pdirac/critical.hpp"
#include "pdirac/eigen.hpp"
#include "pdirac/energy.hpp"
#include "pdirac/io.hpp"
#include "pdirac/lattice.hpp"

namespace py = pybind11;
using namespace pdirac;

namespace {

py::array_t<Complex> field_to_array(const SpinorField& f) {
  std::vector<py::ssize_t> shape;
  for (int n : f.model->grid()) shape.push_back(n);
  shape.push_back(f.spinor_dim);
  py::array_t<Complex> out(shape);
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

SpinorField field_from_array(std::shared_ptr<TorusModel> model, int spinor_dim,
                             const py::array_t<Complex, py::array::c_style | py::array::forcecast>& values) {
  SpinorField f(model, spinor_dim);
  if (static_cast<std::size_t>(values.size()) != f.values.size())
    throw std::invalid_argument("value array does not match sites * spinor_dim");
  std::copy(values.data(), values.data() + values.size(), f.values.begin());
  return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spectral p-Dirac toolkit on flat spin tori";

  py::class_<GammaSet>(m, "GammaSet")
      .def_readonly("m", &GammaSet::m)
      .def_readonly("spinor_dim", &GammaSet::spinor_dim)
      .def("gamma", [](const GammaSet& g, int i) {
        const Matrix& mat = g.gamma(i);
        py::array_t<Complex> out({mat.rows(), mat.cols()});
        for (Eigen::Index r = 0; r < mat.rows(); ++r)
          for (Eigen::Index c = 0; c < mat.cols(); ++c)
            out.mutable_at(r, c) = mat(r, c);
        return out;
      });
  m.def("build_gamma", &build_gamma, py::arg("m"));
  m.def("check_relations", &check_relations);
  m.def("spinor_dimension", &spinor_dimension);

  py::class_<TorusModel, std::shared_ptr<TorusModel>>(m, "TorusModel")
      .def(py::init<int, std::vector<int>, std::vector<double>, std::vector<double>>(),
           py::arg("m"), py::arg("grid"), py::arg("lengths") = std::vector<double>{},
           py::arg("twist") = std::vector<double>{})
      .def_property_readonly("m", &TorusModel::dim)
      .def_property_readonly("grid", &TorusModel::grid)
      .def_property_readonly("lengths", &TorusModel::lengths)
      .def_property_readonly("twist", &TorusModel::twist)
      .def_property_readonly("sites", &TorusModel::sites)
      .def_property_readonly("volume", &TorusModel::volume)
      .def_property_readonly("cell_volume", &TorusModel::cell_volume)
      .def_property_readonly("invertible", &TorusModel::invertible);

  py::class_<SpinorField>(m, "SpinorField")
      .def_property_readonly("spinor_dim", [](const SpinorField& f) { return f.spinor_dim; })
      .def_property_readonly("values", &field_to_array)
      .def("__neg__", [](const SpinorField& f) { return -f; })
      .def("__add__", [](const SpinorField& a, const SpinorField& b) { return a + b; })
      .def("__sub__", [](const SpinorField& a, const SpinorField& b) { return a - b; })
      .def("__rmul__", [](const SpinorField& f, Complex c) { return c * f; });

  m.def("field_from_array", &field_from_array, py::arg("model"), py::arg("spinor_dim"),
        py::arg("values"));
  m.def(
      "random_field",
      [](std::shared_ptr<TorusModel> model, int spinor_dim, std::uint64_t seed) {
        return random_field(std::move(model), spinor_dim, seed);
      },
      py::arg("model"), py::arg("spinor_dim"), py::arg("seed"));
  m.def("lp_norm", &lp_norm, py::arg("field"), py::arg("p"));
  m.def("inner", &inner);
  m.def("save_field", &save_field);
  m.def("load_field", &load_field);

  py::class_<SpectrumEntry>(m, "SpectrumEntry")
      .def_readonly("eigenvalue", &SpectrumEntry::eigenvalue)
      .def_readonly("multiplicity", &SpectrumEntry::multiplicity)
      .def_readonly("mode", &SpectrumEntry::mode);

  py::class_<DiracOperator, std::shared_ptr<DiracOperator>>(m, "DiracOperator")
      .def(py::init([](std::shared_ptr<TorusModel> model) {
             GammaSet gamma = build_gamma(model->dim());
             return std::make_shared<DiracOperator>(std::move(model), std::move(gamma));
           }),
           py::arg("model"))
      .def_property_readonly("spinor_dim", &DiracOperator::spinor_dim)
      .def_property_readonly("singular", &DiracOperator::singular)
      .def_property_readonly("min_momentum", &DiracOperator::min_momentum)
      .def("apply", &DiracOperator::apply)
      .def("apply_laplacian", &DiracOperator::apply_laplacian)
      .def("derivative", &DiracOperator::derivative, py::arg("field"), py::arg("axis"))
      .def("apply_p", &DiracOperator::apply_p, py::arg("field"), py::arg("p"),
           py::arg("eps") = 0.0)
      .def("sobolev_norm", &DiracOperator::sobolev_norm, py::arg("field"), py::arg("p"))
      .def("h1p_norm", &DiracOperator::h1p_norm, py::arg("field"), py::arg("p"))
      .def("spectrum", &DiracOperator::spectrum, py::arg("count"))
      .def("eigenfield", &DiracOperator::eigenfield, py::arg("index"))
      .def("eigenvalue",
           [](const DiracOperator& d, std::size_t i) { return d.eigenfield_info(i).s; });

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def_static("zero", &Nonlinearity::zero)
      .def_static("power", &Nonlinearity::power, py::arg("c"), py::arg("e"),
                  py::arg("eps_h") = -1.0)
      .def_readonly("c", &Nonlinearity::c)
      .def_readonly("e", &Nonlinearity::e)
      .def_readonly("eps_h", &Nonlinearity::eps_h);

  py::class_<Classification>(m, "Classification")
      .def_readonly("h1", &Classification::h1)
      .def_readonly("h2", &Classification::h2)
      .def_readonly("h3", &Classification::h3)
      .def_readonly("h4", &Classification::h4)
      .def_readonly("hi", &Classification::hi)
      .def_readonly("hii", &Classification::hii)
      .def_readonly("q", &Classification::q)
      .def_readonly("mu", &Classification::mu)
      .def_readonly("nu", &Classification::nu)
      .def("superlinear", &Classification::superlinear)
      .def("sublinear", &Classification::sublinear)
      .def("to_json", &Classification::to_json);
  m.def("classify", &classify, py::arg("nonlinearity"), py::arg("p"), py::arg("m"));

  py::class_<Energy>(m, "Energy")
      .def(py::init([](std::shared_ptr<DiracOperator> dirac, double p, Nonlinearity nl,
                       double eps, bool override_p_range) {
             return Energy(std::move(dirac), p, nl, eps, override_p_range);
           }),
           py::arg("dirac"), py::arg("p"), py::arg("nonlinearity"), py::arg("eps") = -1.0,
           py::arg("override_p_range") = false)
      .def_property_readonly("p", &Energy::p)
      .def_property_readonly("eps", &Energy::eps)
      .def("classification", &Energy::classification)
      .def("value", &Energy::value)
      .def("gradient", &Energy::gradient)
      .def("residual_norm", &Energy::residual_norm)
      .def("nehari_defect", &Energy::nehari_defect);
  m.def("hcal", &hcal);
  m.def("hcal_prime", &hcal_prime);

  py::class_<TraceEntry>(m, "TraceEntry")
      .def_readonly("iter", &TraceEntry::iter)
      .def_readonly("phase", &TraceEntry::phase)
      .def_readonly("value", &TraceEntry::value)
      .def_readonly("residual", &TraceEntry::residual)
      .def_readonly("norm_1p", &TraceEntry::norm_1p);

  py::class_<EigenConfig>(m, "EigenConfig")
      .def(py::init<>())
      .def_readwrite("p", &EigenConfig::p)
      .def_readwrite("tolerance", &EigenConfig::tolerance)
      .def_readwrite("max_iter", &EigenConfig::max_iter)
      .def_readwrite("restarts", &EigenConfig::restarts)
      .def_readwrite("eps", &EigenConfig::eps)
      .def_readwrite("seed", &EigenConfig::seed)
      .def_readwrite("override_p_range", &EigenConfig::override_p_range);

  py::class_<EigenPair>(m, "EigenPair")
      .def_readonly("lam", &EigenPair::lambda)
      .def_readonly("field", &EigenPair::field)
      .def_readonly("residual", &EigenPair::residual)
      .def_readonly("iterations", &EigenPair::iterations)
      .def_readonly("seed", &EigenPair::seed)
      .def_readonly("accepted", &EigenPair::accepted)
      .def_readonly("message", &EigenPair::message)
      .def_readonly("trace", &EigenPair::trace);

  m.def(
      "rayleigh",
      [](const DiracOperator& d, double p, const SpinorField& f) { return rayleigh(d, p, f); },
      py::arg("dirac"), py::arg("p"), py::arg("field"));
  m.def(
      "min_eigen",
      [](const DiracOperator& d, const EigenConfig& c) { return min_eigen(d, c); },
      py::arg("dirac"), py::arg("config"));
  m.def(
      "ls_sequence",
      [](const DiracOperator& d, const EigenConfig& c, int n) { return ls_sequence(d, c, n); },
      py::arg("dirac"), py::arg("config"), py::arg("n"));
  m.def(
      "weak_eigen_check",
      [](const DiracOperator& d, double p, double lambda, const SpinorField& f, int count) {
        return weak_eigen_check(d, p, lambda, f, count);
      },
      py::arg("dirac"), py::arg("p"), py::arg("lam"), py::arg("field"),
      py::arg("test_count") = 16);

  py::class_<MonotoneResult>(m, "MonotoneResult")
      .def_readonly("lhs", &MonotoneResult::lhs)
      .def_readonly("rhs", &MonotoneResult::rhs)
      .def_readonly("holds", &MonotoneResult::holds);
  m.def(
      "monotone_inequality_check",
      [](const DiracOperator& d, double p, const SpinorField& f, const SpinorField& g) {
        return monotone_inequality_check(d, p, f, g);
      },
      py::arg("dirac"), py::arg("p"), py::arg("f"), py::arg("g"));

  py::class_<TailResult>(m, "TailResult")
      .def_readonly("tau", &TailResult::tau)
      .def_readonly("residual", &TailResult::residual)
      .def_readonly("iterations", &TailResult::iterations)
      .def_readonly("accepted", &TailResult::accepted);
  m.def(
      "tail_embedding_constant",
      [](const DiracOperator& d, double p, double q, int k, const EigenConfig& c) {
        return tail_embedding_constant(d, p, q, k, c);
      },
      py::arg("dirac"), py::arg("p"), py::arg("q"), py::arg("k"),
      py::arg("config") = EigenConfig{});

  py::class_<SolveConfig>(m, "SolveConfig")
      .def(py::init<>())
      .def_readwrite("path_points", &SolveConfig::path_points)
      .def_readwrite("tol", &SolveConfig::tol)
      .def_readwrite("max_iter", &SolveConfig::max_iter)
      .def_readwrite("seed", &SolveConfig::seed)
      .def_readwrite("restarts", &SolveConfig::restarts)
      .def_readwrite("rim_radius", &SolveConfig::rim_radius)
      .def_readwrite("rim_samples", &SolveConfig::rim_samples);

  py::enum_<PointKind>(m, "PointKind")
      .value("mountain_pass", PointKind::mountain_pass)
      .value("minimizer", PointKind::minimizer)
      .value("fountain", PointKind::fountain)
      .value("dual_fountain", PointKind::dual_fountain)
      .value("constant_branch", PointKind::constant_branch);

  py::class_<CriticalPoint>(m, "CriticalPoint")
      .def_readonly("field", &CriticalPoint::field)
      .def_readonly("value", &CriticalPoint::value)
      .def_readonly("grad_residual", &CriticalPoint::grad_residual)
      .def_readonly("nehari", &CriticalPoint::nehari)
      .def_readonly("kind", &CriticalPoint::kind)
      .def_readonly("k", &CriticalPoint::k)
      .def_readonly("iterations", &CriticalPoint::iterations)
      .def_readonly("accepted", &CriticalPoint::accepted)
      .def_readonly("message", &CriticalPoint::message)
      .def_readonly("trace", &CriticalPoint::trace);

  m.def("rim_estimate",
        [](const Energy& e, double r, int samples, std::uint64_t seed) {
          return rim_estimate(e, r, samples, seed);
        },
        py::arg("energy"), py::arg("r"), py::arg("samples") = 64, py::arg("seed") = 0);
  m.def("constant_branch", &constant_branch);
  m.def("constant_branch_point", &constant_branch_point);
  m.def(
      "find_e",
      [](const Energy& e, const SpinorField& direction, double r) {
        return find_e(e, direction, r);
      },
      py::arg("energy"), py::arg("direction"), py::arg("r"));
  m.def(
      "mountain_pass",
      [](const Energy& e, const SolveConfig& c, std::optional<SpinorField> direction) {
        return mountain_pass(e, c, std::move(direction));
      },
      py::arg("energy"), py::arg("config"), py::arg("initial_direction") = py::none());
  m.def(
      "global_minimize",
      [](const Energy& e, const SolveConfig& c) { return global_minimize(e, c); },
      py::arg("energy"), py::arg("config"));
  m.def(
      "fountain_sequence",
      [](const Energy& e, const SolveConfig& c, int kmax) {
        return fountain_sequence(e, c, kmax);
      },
      py::arg("energy"), py::arg("config"), py::arg("kmax"));
  m.def(
      "dual_fountain_sequence",
      [](const Energy& e, const SolveConfig& c, int kmax) {
        return dual_fountain_sequence(e, c, kmax);
      },
      py::arg("energy"), py::arg("config"), py::arg("kmax"));

  py::class_<TrendReport>(m, "TrendReport")
      .def_readonly("ok", &TrendReport::ok)
      .def_readonly("message", &TrendReport::message);
  m.def("fountain_trend", &fountain_trend);
  m.def("dual_fountain_trend", &dual_fountain_trend);

  py::class_<PsReport>(m, "PsReport")
      .def_readonly("bounded", &PsReport::bounded)
      .def_readonly("max_norm", &PsReport::max_norm)
      .def_readonly("final_residual", &PsReport::final_residual)
      .def_readonly("label", &PsReport::label);
  m.def(
      "ps_diagnostic",
      [](const Energy& e, const std::vector<TraceEntry>& trace) {
        return ps_diagnostic(e, trace);
      },
      py::arg("energy"), py::arg("trace"));
  m.def(
      "weak_solution_check",
      [](const Energy& e, const SpinorField& psi, int count, std::uint64_t seed) {
        return weak_solution_check(e, psi, count, seed);
      },
      py::arg("energy"), py::arg("psi"), py::arg("count") = 50, py::arg("seed") = 0);

  m.attr("__version__") = "0.1.0";
}
