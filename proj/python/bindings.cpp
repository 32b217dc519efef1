#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zitter/constants.hpp"
#include "zitter/electrodynamics.hpp"
#include "zitter/experiment.hpp"
#include "zitter/fokker_planck.hpp"
#include "zitter/grid.hpp"
#include "zitter/langevin.hpp"
#include "zitter/mass_ledger.hpp"
#include "zitter/schrodinger.hpp"

namespace py = pybind11;
namespace ex = zitter::experiment;
using namespace zitter;
using nlohmann::json;

namespace {

json to_json(const py::handle& h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<long long>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    json o = json::object();
    for (const auto& item : h.cast<py::dict>())
      o[py::str(item.first).cast<std::string>()] = to_json(item.second);
    return o;
  }
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    json a = json::array();
    for (const auto& item : h.cast<py::sequence>()) a.push_back(to_json(item));
    return a;
  }
  throw std::invalid_argument("unsupported config value type");
}

py::object to_py(const json& j) {
  using value_t = json::value_t;
  switch (j.type()) {
    case value_t::boolean: return py::bool_(j.get<bool>());
    case value_t::number_integer: return py::int_(j.get<long long>());
    case value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case value_t::number_float: return py::float_(j.get<double>());
    case value_t::string: return py::str(j.get<std::string>());
    case value_t::array: {
      py::list l;
      for (const auto& e : j) l.append(to_py(e));
      return l;
    }
    case value_t::object: {
      py::dict d;
      for (const auto& [k, v] : j.items()) d[py::str(k)] = to_py(v);
      return d;
    }
    default: return py::none();
  }
}

json config_json(const py::object& cfg) {
  if (py::isinstance<py::str>(cfg)) return json::parse(cfg.cast<std::string>());
  return to_json(cfg);
}

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray =
    py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Grid line_grid(py::ssize_t n, double spacing, double origin, Boundary b,
               Geometry geo = Geometry::Cartesian) {
  return Grid({static_cast<int>(n)}, {spacing}, {origin}, b, geo);
}

}  // namespace

PYBIND11_MODULE(zitter, m) {
  m.doc() = "diffusion ensembles, density transport, wave evolution, and "
            "energy bookkeeping";
  m.attr("__version__") = ZITTER_VERSION;

  m.def("known_experiments",
        [] { return ex::known_experiments(); },
        "names accepted by run_experiment and the command line runner");

  m.def("validate_config",
        [](const py::object& config) {
          return ex::validate_config(config_json(config));
        },
        py::arg("config"),
        "schema diagnostics for a config dict or JSON string; empty means "
        "well-formed");

  m.def("run_dir_name",
        [](const py::object& config) {
          return ex::run_dir_name(ex::config_from_json(config_json(config)));
        },
        py::arg("config"));

  m.def("run_experiment",
        [](const py::object& config, bool write) {
          const ex::Config cfg = ex::config_from_json(config_json(config));
          ex::RunResult r;
          {
            py::gil_scoped_release rel;
            r = ex::run(cfg);
          }
          py::dict out;
          out["results"] = to_py(r.results);
          py::list checks;
          for (const auto& c : r.checks) {
            py::dict d;
            d["name"] = c.name;
            d["value"] = c.value;
            d["threshold"] = c.threshold;
            d["pass"] = c.pass;
            checks.append(d);
          }
          out["checks"] = checks;
          out["ok"] = r.ok();
          out["csv"] = r.csv;
          if (write) out["run_dir"] = ex::write_run(cfg, r, 0.0);
          return out;
        },
        py::arg("config"), py::arg("write") = false,
        "run one experiment; write=True also writes the run directory");

  m.def("simulate_ensemble",
        [](int paths, int steps, double dt, double beta, int dim,
           std::uint64_t seed, int record_stride, int threads) {
          langevin::StepperConfig sc;
          sc.dt = dt;
          sc.nSteps = steps;
          sc.nPaths = paths;
          sc.seed = seed;
          sc.beta = beta;
          sc.dim = dim;
          sc.recordStride = record_stride;
          sc.threads = threads;
          sc.validate();
          langevin::PathEnsemble ens;
          {
            py::gil_scoped_release rel;
            ens = langevin::simulate_ensemble(sc, {});
          }
          const auto fit = langevin::msd_and_diffusion(ens);
          py::array_t<double> pos({ens.nPaths, ens.nSnapshots, ens.dim});
          std::copy(ens.positions.begin(), ens.positions.end(),
                    pos.mutable_data());
          py::dict out;
          out["times"] = as_array(ens.times);
          out["positions"] = pos;
          out["msd"] = as_array(fit.msd);
          out["beta_hat"] = fit.betaHat;
          out["slope"] = fit.slope;
          out["rsq"] = fit.rsq;
          return out;
        },
        py::arg("paths"), py::arg("steps"), py::arg("dt"), py::arg("beta"),
        py::arg("dim") = 1, py::arg("seed") = 0, py::arg("record_stride") = 1,
        py::arg("threads") = 1,
        "drift-free ensemble walk; returns trajectories and the diffusion fit");

  m.def("diffuse_density",
        [](const DoubleArray& rho, double spacing, double beta, double t_final,
           double origin, bool periodic) {
          if (rho.ndim() != 1) throw std::invalid_argument("rho must be 1-D");
          if (t_final <= 0.0)
            throw std::invalid_argument("t_final must be > 0");
          const Grid g = line_grid(rho.shape(0), spacing, origin,
                                   periodic ? Boundary::Periodic
                                            : Boundary::Reflecting);
          std::vector<double> v(rho.data(), rho.data() + rho.shape(0));
          fp::State s{ScalarField(g, std::move(v)), VectorField(g), beta, 0.0};
          const double dt0 = fp::stable_dt(s);
          const int steps =
              std::max(1, static_cast<int>(std::ceil(t_final / dt0)));
          const double dt = t_final / steps;
          py::gil_scoped_release rel;
          for (int k = 0; k < steps; ++k) s = fp::forward_step(s, dt);
          py::gil_scoped_acquire acq;
          return as_array(s.rho.values());
        },
        py::arg("rho"), py::arg("spacing"), py::arg("beta"),
        py::arg("t_final"), py::arg("origin") = 0.0,
        py::arg("periodic") = true,
        "evolve a 1-D density under pure diffusion with stable explicit steps");

  m.def("solve_ground_state",
        [](const DoubleArray& potential, double spacing, double origin,
           double mass, double hbar, bool radial, int k, double tol) {
          if (potential.ndim() != 1)
            throw std::invalid_argument("potential must be 1-D");
          const Grid g =
              line_grid(potential.shape(0), spacing, origin,
                        Boundary::DirichletZero,
                        radial ? Geometry::RadialSpherical : Geometry::Cartesian);
          schrod::HamiltonianSpec spec;
          spec.potential = ScalarField(
              g, std::vector<double>(potential.data(),
                                     potential.data() + potential.shape(0)));
          spec.mass = mass;
          spec.hbar = hbar;
          schrod::EigenSolution sol;
          {
            py::gil_scoped_release rel;
            sol = schrod::solve_stationary(spec, k, tol);
          }
          const py::ssize_t n = potential.shape(0);
          py::array_t<std::complex<double>> states({static_cast<py::ssize_t>(k), n});
          for (int i = 0; i < k; ++i)
            std::copy(sol.states[i].values().begin(),
                      sol.states[i].values().end(),
                      states.mutable_data() + static_cast<py::ssize_t>(i) * n);
          py::dict out;
          out["energies"] = as_array(sol.energies);
          out["states"] = states;
          out["residuals"] = as_array(sol.residualNorms);
          return out;
        },
        py::arg("potential"), py::arg("spacing"), py::arg("origin"),
        py::arg("mass") = 1.0, py::arg("hbar") = 1.0, py::arg("radial") = false,
        py::arg("k") = 1, py::arg("tol") = 1.0e-10,
        "lowest eigenpairs of the scalar-potential Hamiltonian on a line or "
        "radial grid");

  m.def("evolve_wave",
        [](const DoubleArray& potential, const ComplexArray& psi0,
           double spacing, double origin, double dt, int steps, double mass,
           double hbar, int snapshot_stride) {
          if (potential.ndim() != 1 || psi0.ndim() != 1 ||
              potential.shape(0) != psi0.shape(0))
            throw std::invalid_argument(
                "potential and psi0 must be 1-D with equal length");
          const Grid g = line_grid(potential.shape(0), spacing, origin,
                                   Boundary::DirichletZero);
          schrod::HamiltonianSpec spec;
          spec.potential = ScalarField(
              g, std::vector<double>(potential.data(),
                                     potential.data() + potential.shape(0)));
          spec.mass = mass;
          spec.hbar = hbar;
          WaveFunction psi(
              g,
              std::vector<std::complex<double>>(psi0.data(),
                                                psi0.data() + psi0.shape(0)),
              mass, hbar);
          psi.normalize();
          schrod::EvolveOptions opts;
          opts.snapshotStride = snapshot_stride;
          schrod::EvolveResult ev;
          {
            py::gil_scoped_release rel;
            ev = schrod::evolve(spec, psi, dt, steps, opts);
          }
          const py::ssize_t n = psi0.shape(0);
          py::array_t<std::complex<double>> finalPsi(n);
          std::copy(ev.psi.values().begin(), ev.psi.values().end(),
                    finalPsi.mutable_data());
          py::dict out;
          out["psi"] = finalPsi;
          out["times"] = as_array(ev.times);
          out["norms"] = as_array(ev.norms);
          out["energies"] = as_array(ev.energies);
          if (!ev.snapshots.empty()) {
            py::array_t<std::complex<double>> snaps(
                {static_cast<py::ssize_t>(ev.snapshots.size()), n});
            for (std::size_t i = 0; i < ev.snapshots.size(); ++i)
              std::copy(ev.snapshots[i].values().begin(),
                        ev.snapshots[i].values().end(),
                        snaps.mutable_data() + static_cast<py::ssize_t>(i) * n);
            out["snapshots"] = snaps;
            out["snapshot_times"] = as_array(ev.snapshotTimes);
          }
          return out;
        },
        py::arg("potential"), py::arg("psi0"), py::arg("spacing"),
        py::arg("origin"), py::arg("dt"), py::arg("steps"),
        py::arg("mass") = 1.0, py::arg("hbar") = 1.0,
        py::arg("snapshot_stride") = 0,
        "Crank-Nicolson evolution of a normalized 1-D state under a static "
        "potential");

  m.def("replay_transitions",
        [](double energy, double v1, double v2, double ek, double radius,
           double nu_vib, double nu_rot,
           const std::vector<std::pair<double, double>>& events) {
          ledger::Terms t;
          t.v1 = v1;
          t.v2 = v2;
          t.ek = ek;
          const auto st = ledger::state_from_frequencies(energy, t, radius,
                                                         nu_vib, nu_rot);
          std::vector<ledger::Transition> evs(events.size());
          for (std::size_t i = 0; i < events.size(); ++i) {
            evs[i].deltaE = events[i].first;
            evs[i].jitter = events[i].second;
          }
          const auto rep =
              ledger::replay_log_json(ledger::log_to_json(st, evs));
          py::dict out;
          out["n_events"] = rep.nEvents;
          out["max_mass_drift"] = rep.maxMassDrift;
          out["max_invariant_residual"] = rep.maxInvariantResidual;
          out["final_mass"] = rep.finalState.mass;
          out["final_nu_vib"] = rep.finalState.nuVib;
          out["ok"] = rep.ok;
          return out;
        },
        py::arg("energy"), py::arg("v1"), py::arg("v2"), py::arg("ek"),
        py::arg("radius"), py::arg("nu_vib"), py::arg("nu_rot"),
        py::arg("events"),
        "replay (deltaE, jitter) transitions against the mass invariant");

  m.def("relativistic_expansion",
        [](double m0, double dv, double c, int order) {
          const auto r = ledger::relativistic_expansion(m0, dv, c, order);
          py::dict out;
          out["coefficients"] = as_array(r.coefficients);
          out["terms"] = as_array(r.terms);
          out["exact"] = r.exact;
          out["partial_sum"] = r.partial_sum(order);
          return out;
        },
        py::arg("m0"), py::arg("dv"), py::arg("c"), py::arg("order") = 4);

  m.def("energy_split",
        [](double m0, double dv, double c) {
          const auto s = ledger::energy_split(m0, dv, c);
          return py::make_tuple(s.magnetic, s.radiation);
        },
        py::arg("m0"), py::arg("dv"), py::arg("c"),
        "(magnetic, radiation) halves of the kinetic energy");

  m.def("magnetic_mass",
        [] { return ed::magnetic_mass(EmConstants::si()); },
        "mu0 q^2 / (4 pi rMin) for the tabulated electron constants");
  m.def("magnetic_energy",
        [](double dv) { return ed::magnetic_energy(dv, EmConstants::si()); },
        py::arg("dv"));
  m.def("radiated_energy",
        [](double dv) { return ed::radiated_energy(dv, EmConstants::si()); },
        py::arg("dv"));
  m.def("larmor_power",
        [](double dv, double accel) {
          const auto rep =
              ed::poynting_and_larmor(dv, accel, 4096, EmConstants::si());
          return py::make_tuple(rep.powerClosed, rep.powerQuad);
        },
        py::arg("dv"), py::arg("accel"),
        "(closed form, quadrature) radiated power of a transition dipole");

  m.def("beta_si", [] { return PhysicalConstants::si().beta(); },
        "hbar / (2 m_e) in m^2/s");
}
