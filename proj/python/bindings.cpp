#include "til/curie_weiss.hpp"
#include "til/dobrushin.hpp"
#include "til/glauber.hpp"
#include "til/io.hpp"
#include "til/spin_space.hpp"
#include "til/tensor.hpp"
#include "til/tsl.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace til;

namespace {

// JSON crosses the boundary as text; the package decodes it
std::string dumps(const Json& j) { return j.dump(); }

GaussianNormalization normalization(const std::string& s) {
  if (s == "per-orbit") return GaussianNormalization::PerOrbit;
  if (s == "symmetrized") return GaussianNormalization::Symmetrized;
  throw DomainError("normalization must be per-orbit or symmetrized");
}

}  // namespace

PYBIND11_MODULE(_til, m) {
  m.doc() = "tensor Ising models: spectral gaps, certificates, tensorized localization";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  m.def("max_dimension", &max_dimension);
  m.def("spin_matrix", &spin_matrix, py::arg("n"), "2^n x n matrix, row x holds the spins of configuration x");

  py::class_<SymTensor4>(m, "SymTensor4")
      .def(py::init<int>(), py::arg("n"))
      .def_static("symmetrize", &SymTensor4::symmetrize, py::arg("n"), py::arg("raw"))
      .def_static("rank1", &SymTensor4::rank1, py::arg("u"))
      .def_static("curie_weiss", &SymTensor4::curie_weiss, py::arg("n"), py::arg("beta"))
      .def_static(
          "from_json", [](const std::string& text) { return tensor_from_json(Json::parse(text)); }, py::arg("text"))
      .def("to_json", [](const SymTensor4& T) { return dumps(tensor_to_json(T)); })
      .def_property_readonly("n", &SymTensor4::n)
      .def("__call__", &SymTensor4::operator(), py::arg("i"), py::arg("j"), py::arg("k"), py::arg("l"))
      .def("evaluate", &SymTensor4::evaluate, py::arg("x"))
      .def("potential_table", &SymTensor4::potential_table)
      .def("scaled", &SymTensor4::scaled, py::arg("c"))
      .def("__add__", &SymTensor4::operator+)
      .def("flatten", [](const SymTensor4& T) { return flatten(T).matrix; });

  m.def(
      "injective_norm",
      [](const SymTensor4& T, int starts, double tol, std::uint64_t seed) {
        const InjectiveNorm r = injective_norm(T, {starts, tol, seed});
        return py::make_tuple(r.lower, r.upper, r.argmax);
      },
      py::arg("T"), py::arg("starts") = 64, py::arg("tol") = 1e-10, py::arg("seed") = 0,
      "(lower, upper, argmax) with lower <= |T|_inj <= upper");
  m.def(
      "sample_gaussian_tensor",
      [](int n, std::uint64_t seed, const std::string& norm) {
        Rng rng(seed);
        return sample_gaussian_tensor(n, rng, 4, normalization(norm));
      },
      py::arg("n"), py::arg("seed"), py::arg("normalization") = "per-orbit");
  m.def("curie_weiss_potential", &curie_weiss_potential, py::arg("n"), py::arg("beta"), py::arg("p") = 4.0);

  m.def(
      "spectral_gap", [](const Vec& H, int n) { return dumps(to_json(exact_spectral_gap(build_kernel(H, n)))); },
      py::arg("H"), py::arg("n"));
  m.def(
      "mixing_time",
      [](const Vec& H, int n, double eps) {
        const GlauberKernel K = build_kernel(H, n);
        return py::make_tuple(tv_mixing_time(K, eps), mixing_time_bound(K, exact_spectral_gap(K), eps));
      },
      py::arg("H"), py::arg("n"), py::arg("eps") = 0.25, "(measured t_mix, spectral bound)");
  m.def(
      "dirichlet_form", [](const Vec& w, int n, const Vec& phi) { return dirichlet_form(DiscreteMeasure(n, w), phi); },
      py::arg("weights"), py::arg("n"), py::arg("phi"));

  m.def(
      "influence_matrix", [](const Vec& H, int n) { return influence_matrix_exact(H, n).A; }, py::arg("H"),
      py::arg("n"));
  m.def(
      "derivative_matrix", [](const Vec& F, int n) { return derivative_matrix_exact(F, n).D; }, py::arg("F"),
      py::arg("n"));
  m.def(
      "certificate",
      [](const SymTensor4& T, int starts, std::uint64_t seed) {
        return dumps(to_json(tensor_gap_certificate(T, {starts, 1e-10, seed})));
      },
      py::arg("T"), py::arg("starts") = 64, py::arg("seed") = 0);
  m.def("spin_glass_constant", &spin_glass_constant);

  m.def("smoothed_projection", &smoothed_projection, py::arg("H_basis"), py::arg("v"), py::arg("u"),
        py::arg("delta"));
  m.def(
      "decompose",
      [](const SymTensor4& T, const std::string& phi, std::uint64_t seed, int samples, double delta, double dt_rel) {
        TslParams p;
        p.delta = delta;
        p.dt_rel = dt_rel;
        const Decomposition4 d = full_decomposition(T, parse_test_function(phi, T.n()), p, seed, samples);
        std::vector<std::string> out;
        for (const auto& c : d.components) out.push_back(dumps(to_json(c)));
        return out;
      },
      py::arg("T"), py::arg("phi") = "magnetization", py::arg("seed") = 0, py::arg("samples") = 1,
      py::arg("delta") = 1e-3, py::arg("dt_rel") = 1e-3);

  m.def("beta_star", &beta_star, py::arg("p") = 4.0, py::arg("tol") = 1e-10);
  m.def(
      "hitting_medians",
      [](const std::vector<int>& ns, double p, double beta, int seeds, std::uint64_t seed, long long budget) {
        std::vector<py::tuple> out;
        for (const auto& s : summarize_hitting(hitting_time_experiment(ns, p, beta, seeds, seed, budget)))
          out.push_back(py::make_tuple(s.n, s.median, s.censored, s.runs));
        return out;
      },
      py::arg("n_list"), py::arg("p"), py::arg("beta"), py::arg("seeds"), py::arg("seed") = 0,
      py::arg("budget") = 100'000'000LL, "[(n, median, censored, runs)]");
}
