#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "calabi/cli.hpp"
#include "calabi/spec_io.hpp"
#include "calabi/verify.hpp"

namespace py = pybind11;
using namespace calabi;

namespace {

std::vector<std::vector<double>> rows(const Mat& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

py::list cube(const Tensor3& t) {
  py::list out;
  for (int i = 0; i < t.dim(); ++i) {
    py::list a;
    for (int j = 0; j < t.dim(); ++j) {
      py::list b;
      for (int k = 0; k < t.dim(); ++k) b.append(t(i, j, k));
      a.append(b);
    }
    out.append(a);
  }
  return out;
}

py::dict invariants(const CompositionSpec& spec, const std::vector<double>& u) {
  const auto inv = compute_invariants(compose(spec), u);
  py::dict d;
  d["x"] = inv.x;
  d["affine_normal"] = inv.xi;
  d["H"] = inv.frame.H;
  d["g"] = rows(inv.frame.g);
  d["cubic_form"] = cube(inv.A);
  d["connection"] = cube(inv.Gamma);
  d["shape_operator"] = rows(inv.shape.B);
  d["principal_curvatures"] = inv.shape.eigenvalues;
  d["L1"] = inv.shape.L1;
  if (inv.J) d["J"] = *inv.J;
  return d;
}

std::tuple<int, std::string, std::string> cli(std::vector<std::string> args) {
  args.insert(args.begin(), "calabi");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Calabi compositions of hyperbolic affine hyperspheres";
  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);

  py::class_<FactorSpec>(m, "Factor")
      .def_property_readonly("dim", &FactorSpec::dim)
      .def_property_readonly("L1", &FactorSpec::L1)
      .def("__repr__", &FactorSpec::describe);
  m.def("point", &make_point_factor, py::arg("value") = 1.0);
  m.def("flat", &make_flat_factor, py::arg("n0"), py::arg("C0"));
  m.def("hyperboloid", &make_hyperboloid_factor, py::arg("n"));
  m.def("composite", &make_composite_factor, py::arg("spec"));

  py::class_<CompositionSpec>(m, "Spec")
      .def(py::init(&make_spec), py::arg("factors"), py::arg("weights") = std::vector<double>{},
           py::arg("id") = std::string{})
      .def_property_readonly("K", &CompositionSpec::K)
      .def_property_readonly("n", &CompositionSpec::n)
      .def_readonly("weights", &CompositionSpec::weights)
      .def_readonly("id", &CompositionSpec::id)
      .def("to_json", [](const CompositionSpec& s) { return spec_to_json(s).dump(); })
      .def("__repr__", &spec_label);

  m.def("parse_spec", &parse_spec, py::arg("text"));
  m.def("load_spec", &load_spec, py::arg("path"));
  m.def("structure_constant", &structure_constant);
  m.def("predicted_L1", &predicted_L1);
  m.def("f_sequence", [](const CompositionSpec& s) {
    const auto lay = layout(s);
    return std::vector<int>(lay.f.begin() + 1, lay.f.end());
  });
  m.def("normalization_constants", &normalization_constants);
  m.def("position", [](const CompositionSpec& s, const std::vector<double>& u) { return compose(s).position(u); });
  m.def("invariants", &invariants, py::arg("spec"), py::arg("u"));
  m.def(
      "verify_json",
      [](const CompositionSpec& s, int samples, double tol, std::uint64_t seed) {
        py::gil_scoped_release nogil;
        return verify_spec(s, samples, tol, seed).to_json().dump();
      },
      py::arg("spec"), py::arg("samples") = 10, py::arg("tol") = 1e-8, py::arg("seed") = 42);
  m.def("cli", &cli, py::arg("args"), "Run the command line tool; returns (exit code, stdout, stderr).");
}
