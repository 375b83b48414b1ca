#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qes/asymptotics.hpp"
#include "qes/crossings.hpp"
#include "qes/export.hpp"
#include "qes/monodromy.hpp"
#include "qes/spectrum.hpp"

namespace py = pybind11;
using namespace qes;

namespace {

/// Exact conversion through big-endian bytes, free of the decimal digit limit.
py::int_ to_python(const BigInt& x) {
  std::size_t count = 0;
  void* raw = mpz_export(nullptr, &count, 1, 1, 1, 0, x.get_mpz_t());
  const py::bytes bytes(static_cast<const char*>(raw), count);
  void (*release)(void*, std::size_t);
  mp_get_memory_functions(nullptr, nullptr, &release);
  if (raw) release(raw, count);
  py::int_ magnitude = py::int_(py::module_::import("builtins").attr("int").attr("from_bytes")(bytes, "big"));
  return sgn(x) < 0 ? py::int_(-magnitude) : magnitude;
}

}  // namespace

PYBIND11_MODULE(_qes, mod) {
  mod.doc() = "Spectra, level crossings and monodromy of the even quasi-exactly solvable sextic";

  static py::exception<NumericalFailure> numerical(mod, "NumericalFailure", PyExc_RuntimeError);
  static py::exception<ConjectureViolation> conjecture(mod, "ConjectureViolation", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const NumericalFailure& e) {
      py::set_error(numerical, e.what());
    } catch (const ConjectureViolation& e) {
      py::set_error(conjecture, e.what());
    }
  });

  mod.def(
      "spectrum",
      [](int m, Complex b, bool scaled) {
        const SexticProblem prob(m);
        return (scaled ? scaled_eigenvalues(prob, b) : eigenvalues(prob, b)).eigenvalues;
      },
      py::arg("m"), py::arg("b"), py::arg("scaled") = false,
      "Eigenvalues sorted by real part, then imaginary part.");

  mod.def(
      "spectrum_json",
      [](int m, Complex b, bool scaled) {
        const SexticProblem prob(m);
        return spectrum_json(m, b, scaled, scaled ? scaled_eigenvalues(prob, b) : eigenvalues(prob, b));
      },
      py::arg("m"), py::arg("b"), py::arg("scaled") = false, "Same JSON as the command line and the service.");

  mod.def(
      "charpoly",
      [](int m) {
        const auto p = charpoly_exact(SexticProblem(m));
        py::dict out;
        for (int i = 0; i <= p.degree_lambda(); ++i)
          for (int j = 0; j <= p.degree_b(); ++j) {
            const BigInt c = p.coeff(i, j);
            if (sgn(c) != 0) out[py::make_tuple(i, j)] = to_python(c);
          }
        return out;
      },
      py::arg("m"), "Nonzero coefficients {(power of lambda, power of b): integer}.");

  mod.def(
      "discriminant",
      [](int m) {
        const auto disc = discriminant_poly(m);
        py::list out;
        for (const auto& c : disc.coeffs()) out.append(to_python(c));
        return out;
      },
      py::arg("m"), "Integer coefficients in b, ascending.");

  mod.def(
      "crossings",
      [](int m) {
        py::list out;
        for (const auto& c : ordered_points(crossing_set(m))) {
          py::dict d;
          d["b"] = c.b;
          d["row"] = c.row;
          d["position"] = c.position;
          d["multiplicity"] = c.multiplicity;
          out.append(d);
        }
        return out;
      },
      py::arg("m"), "Crossing points, upper half plane first, by row and position.");
  mod.def(
      "crossings_json", [](int m) { return crossings_json(crossing_set(m)); }, py::arg("m"));

  mod.def(
      "foci", [](Complex b) { return foci(b); }, py::arg("b"), "(0, f+, f-).");
  mod.def(
      "critical_lambdas", [](Complex b) { return critical_lambdas(b); }, py::arg("b"));
  mod.def("support_interval_real", &support_interval_real, py::arg("b"));
  mod.def("density_real", &density_real, py::arg("b"), py::arg("x"));
  mod.def(
      "cauchy_transform", [](Complex b, Complex z) { return cauchy_transform(b, z); }, py::arg("b"), py::arg("z"));

  mod.def("conjectured_transposition", &conjectured_transposition, py::arg("m"), py::arg("row"), py::arg("position"));
  mod.def(
      "monodromy",
      [](int m, int row, int position) { return monodromy_permutation(m, row, position).transposition; },
      py::arg("m"), py::arg("row"), py::arg("position"),
      "Measured transposition for the loop around the crossing at (row, position).");
  mod.def(
      "track",
      [](int m, const std::vector<Complex>& waypoints, double max_step) {
        if (waypoints.size() < 2) throw InvalidArgument("track: at least two waypoints required");
        std::vector<PathPiece> pieces;
        for (std::size_t k = 0; k + 1 < waypoints.size(); ++k) pieces.push_back(LinePiece{waypoints[k], waypoints[k + 1]});
        TrackOptions opts;
        opts.max_step = max_step;
        return track_path(m, PlanePath(std::move(pieces)), opts).permutation;
      },
      py::arg("m"), py::arg("waypoints"), py::arg("max_step") = 0.02,
      "Permutation in one-line notation along the polygon through the waypoints.");

  mod.def(
      "quartic_beta", [](int m, Complex b) { return quartic_beta(m, b); }, py::arg("m"), py::arg("b"));
}
