#include "spinent/entanglement.hpp"
#include "spinent/errors.hpp"
#include "spinent/idmrg.hpp"
#include "spinent/lanczos.hpp"
#include "spinent/observables.hpp"
#include "spinent/oracle.hpp"
#include "spinent/spin_model.hpp"
#include "spinent/sweep.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spinent;

namespace {

ModelParams make_params(double j_par, double j_perp, double h, int n_sites, double pin,
                        const std::string& boundary, const std::string& frame) {
  ModelParams p;
  p.j_par = j_par;
  p.j_perp = j_perp;
  p.h = h;
  p.n_sites = n_sites;
  p.pin_eps = pin;
  p.boundary = parse_boundary(boundary);
  p.frame = parse_frame(frame);
  return p;
}

TwoQubitDensityMatrix wrap(const Eigen::Matrix4cd& rho) {
  TwoQubitDensityMatrix r;
  r.rho = rho;
  return r;
}

py::dict decomposition_dict(const LSDecomposition& d) {
  py::dict out;
  out["lambda"] = d.lambda;
  out["one_minus_lambda"] = d.one_minus_lambda();
  out["separable"] = d.separable;
  out["c_rho"] = d.c_rho;
  out["c_rho_e"] = d.c_rho_e ? py::cast(*d.c_rho_e) : py::none();
  out["rho_s"] = d.rho_s.rho;
  out["certificate_gap"] = d.certificate_gap;
  if (d.bell)
    out["bell"] = d.bell->as_vector();
  else
    out["bell"] = py::none();
  return out;
}

}  // namespace

PYBIND11_MODULE(_spinent, m) {
  m.doc() = "Spin-chain ground states and two-site entanglement";

  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<CertificateError>(m, "CertificateError", PyExc_RuntimeError);

  m.def(
      "ground_state",
      [](double j_par, double j_perp, double h, int n_sites, double pin, const std::string& boundary,
         const std::string& frame, double tol, std::uint64_t seed) {
        const ModelParams p = make_params(j_par, j_perp, h, n_sites, pin, boundary, frame);
        py::gil_scoped_release release;
        const StateVector s = lanczos_ground_state(build_hamiltonian(p), tol, seed);
        return std::pair{s.energy, s.amplitudes};
      },
      py::arg("j_par"), py::arg("j_perp"), py::arg("h"), py::arg("n_sites"), py::arg("pin") = 0.0,
      py::arg("boundary") = "open", py::arg("frame") = "lab", py::arg("tol") = 1e-10, py::arg("seed") = 1,
      "Lanczos ground state; returns (energy, amplitudes). Bit k of the index is site k+1, set = down.");

  m.def(
      "reduced_density_matrix",
      [](const Eigen::VectorXd& amplitudes, int i, int j) {
        StateVector s;
        s.amplitudes = amplitudes;
        int n = 0;
        while ((Eigen::Index{1} << n) < amplitudes.size()) ++n;
        if ((Eigen::Index{1} << n) != amplitudes.size()) throw std::invalid_argument("length is not a power of two");
        s.n_sites = n;
        return reduced_density_matrix(s, i, j).rho;
      },
      py::arg("amplitudes"), py::arg("i"), py::arg("j"));

  m.def(
      "idmrg",
      [](double j_par, double j_perp, double h, double pin, int kept_states, double energy_tol,
         const std::string& frame) {
        ModelParams p = make_params(j_par, j_perp, h, 2, pin, "open", frame);
        DmrgConfig cfg;
        cfg.kept_states = kept_states;
        cfg.energy_tol = energy_tol;
        DmrgResult r;
        {
          py::gil_scoped_release release;
          r = idmrg_ground_state(p, cfg);
        }
        py::dict out;
        out["energy_per_site"] = r.energy_per_site;
        out["rho"] = r.central.rho;
        out["sx"] = r.magnetization.sx_uniform;
        out["sz_stag"] = r.magnetization.sz_staggered;
        out["iterations"] = r.iterations;
        out["truncation_weight"] = r.truncation_weight;
        return out;
      },
      py::arg("j_par"), py::arg("j_perp"), py::arg("h"), py::arg("pin") = 0.0, py::arg("kept_states") = 64,
      py::arg("energy_tol") = 1e-9, py::arg("frame") = "lab");

  m.def("concurrence", [](const Eigen::Matrix4cd& rho) { return concurrence(rho); }, py::arg("rho"));
  m.def("partial_transpose", &partial_transpose, py::arg("rho"));
  m.def("bell_basis", &bell_basis);
  m.def(
      "ppt_check",
      [](const Eigen::Matrix4cd& rho) {
        const PptResult r = ppt_check(rho);
        return py::make_tuple(r.separable, r.min_pt_eigenvalue);
      },
      py::arg("rho"), "Returns (separable, min eigenvalue of the partial transpose).");

  m.def(
      "ls_decompose",
      [](const Eigen::Matrix4cd& rho, const std::string& mode, bool strict) {
        LsOptions opts;
        opts.mode = mode == "complex" ? BellMode::complex : BellMode::real;
        LSDecomposition d;
        {
          py::gil_scoped_release release;
          try {
            d = ls_decompose(wrap(rho), opts);
          } catch (const CertificateError& e) {
            if (strict) throw;
            d = e.best();
          }
        }
        return decomposition_dict(d);
      },
      py::arg("rho"), py::arg("mode") = "real", py::arg("strict") = true);

  m.def("werner_state", [](double p) { return oracle::werner_state(p).rho; }, py::arg("p"));
  m.def("werner_values", &oracle::werner_values, py::arg("p"));

  m.def(
      "sweep",
      [](double j_par, double j_perp, double h_min, double h_max, int h_steps, int n_sites,
         const std::string& backend, std::vector<double> pins, int separation, int workers) {
        SweepConfig c;
        c.j_par = j_par;
        c.j_perp = j_perp;
        c.h_min = h_min;
        c.h_max = h_max;
        c.h_steps = h_steps;
        c.n_sites = n_sites;
        c.backend = parse_backend(backend);
        c.pin_sequence = std::move(pins);
        c.separation = separation;
        c.workers = workers;
        std::string csv;
        {
          py::gil_scoped_release release;
          csv = to_csv(run_sweep(c).rows);
        }
        return csv;
      },
      py::arg("j_par") = 0.0, py::arg("j_perp") = 1.0, py::arg("h_min") = 0.0, py::arg("h_max") = 1.0,
      py::arg("h_steps") = 101, py::arg("n_sites") = 16, py::arg("backend") = "ed",
      py::arg("pins") = std::vector<double>{1e-2, 1e-3, 1e-4}, py::arg("separation") = 1,
      py::arg("workers") = 0, "Runs a field sweep and returns the CSV text.");
}
