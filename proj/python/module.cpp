#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pfflow/basis.hpp"
#include "pfflow/config.hpp"
#include "pfflow/dual_entropy.hpp"
#include "pfflow/errors.hpp"
#include "pfflow/experiment.hpp"
#include "pfflow/flow.hpp"
#include "pfflow/free_energy.hpp"
#include "pfflow/gaussian_affine.hpp"
#include "pfflow/metric.hpp"
#include "pfflow/oracle.hpp"
#include "pfflow/potential.hpp"
#include "pfflow/sampling.hpp"

namespace py = pybind11;
using namespace pfflow;

namespace {

BasisSet make_basis(const std::string& kind, int m, double l) {
  return BasisSet(basis_kind_from_string(kind), m, l);
}

PushforwardMap1D make_map(const std::string& kind, int m, double l,
                          const Eigen::VectorXd& theta) {
  return PushforwardMap1D(make_basis(kind, m, l), theta);
}

}  // namespace

PYBIND11_MODULE(_pfflow, m) {
  m.doc() = "parametric Fokker-Planck gradient-flow solver";

  py::register_exception<Error>(m, "PfflowError");

  py::class_<BasisSet>(m, "BasisSet")
      .def(py::init(&make_basis), py::arg("kind"), py::arg("m"), py::arg("l"))
      .def_property_readonly("size", &BasisSet::size)
      .def_property_readonly("halfwidth", &BasisSet::halfwidth)
      .def("value", &BasisSet::value)
      .def("derivative", &BasisSet::derivative)
      .def("values", py::overload_cast<double>(&BasisSet::values, py::const_));

  py::class_<PushforwardMap1D>(m, "PushforwardMap1D")
      .def(py::init(&make_map), py::arg("kind"), py::arg("m"), py::arg("l"),
           py::arg("theta"))
      .def_readonly("theta", &PushforwardMap1D::theta)
      .def("value", &PushforwardMap1D::value)
      .def("derivative", &PushforwardMap1D::derivative)
      .def("grad_theta", [](const PushforwardMap1D& map, double x) {
        return grad_theta_map(map, x);
      });

  py::class_<Potential>(m, "Potential")
      .def_static("quadratic", &Potential::quadratic, py::arg("sigma"), py::arg("mu"),
                  py::arg("beta"))
      .def_static("quadratic1d", &Potential::quadratic1d, py::arg("sigma"), py::arg("mu"),
                  py::arg("beta"))
      .def_static("polynomial", &Potential::polynomial, py::arg("coeffs"), py::arg("beta"))
      .def_static("double_well", &Potential::double_well, py::arg("beta"))
      .def_property_readonly("beta", &Potential::beta)
      .def("value", &Potential::value1d)
      .def("gradient", &Potential::gradient1d);

  py::class_<ParticleEnsemble>(m, "ParticleEnsemble")
      .def_readonly("points", &ParticleEnsemble::points)
      .def_property_readonly("count", &ParticleEnsemble::count);

  m.def(
      "sample_reference",
      [](int n, std::uint64_t seed, int dimension, std::uint64_t stream_index) {
        return sample_reference(ReferenceMeasure{dimension, seed}, n, stream_index);
      },
      py::arg("n"), py::arg("seed") = 0, py::arg("dimension") = 1,
      py::arg("stream_index") = 0);

  m.def("pushforward_samples",
        py::overload_cast<const PushforwardMap1D&, const ParticleEnsemble&>(
            &pushforward_samples));

  py::class_<MetricTensor>(m, "MetricTensor")
      .def_readonly("entries", &MetricTensor::entries)
      .def_readonly("sample_count", &MetricTensor::sample_count);

  m.def("metric_1d", &metric_1d);
  m.def(
      "solve_regularized",
      [](const MetricTensor& G, const Eigen::VectorXd& rhs, double ridge) {
        const RegularizedSolve s = solve_regularized(G, rhs, ridge);
        return py::make_tuple(s.solution, s.ridge_used);
      },
      py::arg("G"), py::arg("rhs"), py::arg("ridge") = 0.0);

  py::class_<DualPotential>(m, "DualPotential")
      .def("value", &DualPotential::value)
      .def("derivative", &DualPotential::derivative)
      .def("exp_integral", &DualPotential::exp_integral)
      .def_property_readonly("knot_values", &DualPotential::knot_values);

  py::class_<DualSolveResult>(m, "DualSolveResult")
      .def_readonly("witness", &DualSolveResult::witness)
      .def_readonly("entropy", &DualSolveResult::entropy)
      .def_readonly("sample_term", &DualSolveResult::sample_term)
      .def_readonly("exp_integral", &DualSolveResult::exp_integral)
      .def_readonly("iterations", &DualSolveResult::iterations)
      .def_readonly("grad_sup_norm", &DualSolveResult::grad_sup_norm)
      .def_readonly("outside_fraction", &DualSolveResult::outside_fraction)
      .def_readonly("tail_warning", &DualSolveResult::tail_warning);

  m.def(
      "solve_dual_entropy",
      [](const PushforwardMap1D& map, const ParticleEnsemble& ensemble, double lo,
         double hi, int knots, double tol, int max_iters) {
        return solve_dual_entropy(map, ensemble, DualGridSpec{lo, hi, knots},
                                  DualAscentParams{tol, max_iters});
      },
      py::arg("map"), py::arg("ensemble"), py::arg("lo") = -7.0, py::arg("hi") = 7.0,
      py::arg("knots") = 201, py::arg("tol") = 1e-6, py::arg("max_iters") = 5000);

  py::class_<FreeEnergyEstimate>(m, "FreeEnergyEstimate")
      .def_readonly("value", &FreeEnergyEstimate::value)
      .def_readonly("potential_term", &FreeEnergyEstimate::potential_term)
      .def_readonly("entropy_term", &FreeEnergyEstimate::entropy_term)
      .def_readonly("std_error", &FreeEnergyEstimate::std_error);

  m.def("potential_term", &potential_term);
  m.def(
      "free_energy",
      [](const PushforwardMap1D& map, const ParticleEnsemble& ensemble,
         const Potential& V, double lo, double hi, int knots, double tol,
         int max_iters) {
        return free_energy(map, ensemble, V, DualGridSpec{lo, hi, knots},
                           DualAscentParams{tol, max_iters});
      },
      py::arg("map"), py::arg("ensemble"), py::arg("potential"), py::arg("lo") = -7.0,
      py::arg("hi") = 7.0, py::arg("knots") = 201, py::arg("tol") = 1e-6,
      py::arg("max_iters") = 5000);
  m.def("grad_free_energy",
        [](const PushforwardMap1D& map, const ParticleEnsemble& ensemble,
           const Potential& V, const DualPotential* witness) {
          return grad_free_energy(map, ensemble, V, witness);
        },
        py::arg("map"), py::arg("ensemble"), py::arg("potential"),
        py::arg("witness") = nullptr);
  m.def("entropy_change_of_variables", &entropy_change_of_variables);

  py::class_<FlowConfig>(m, "FlowConfig")
      .def(py::init<>())
      .def_readwrite("dt", &FlowConfig::dt)
      .def_readwrite("steps", &FlowConfig::steps)
      .def_readwrite("sample_count", &FlowConfig::sample_count)
      .def_readwrite("ridge", &FlowConfig::ridge)
      .def_readwrite("snapshot_stride", &FlowConfig::snapshot_stride)
      .def_readwrite("seed", &FlowConfig::seed)
      .def_readwrite("dual_knots", &FlowConfig::dual_knots)
      .def_readwrite("dual_padding", &FlowConfig::dual_padding);

  py::class_<FlowTrajectory>(m, "FlowTrajectory")
      .def_readonly("times", &FlowTrajectory::times)
      .def_readonly("thetas", &FlowTrajectory::thetas)
      .def_readonly("free_energies", &FlowTrajectory::free_energies)
      .def_readonly("free_energy_std_errors", &FlowTrajectory::free_energy_std_errors)
      .def_readonly("metric_condition_numbers", &FlowTrajectory::metric_condition_numbers)
      .def_readonly("ridge_used", &FlowTrajectory::ridge_used)
      .def_property_readonly("complete", [](const FlowTrajectory& t) {
        return t.status == FlowStatus::complete;
      });

  m.def("euler_step", &euler_step, py::arg("theta"), py::arg("basis"), py::arg("ensemble"),
        py::arg("potential"), py::arg("config"));
  m.def(
      "run_flow",
      [](const Eigen::VectorXd& theta0, const BasisSet& basis, const Potential& V,
         const FlowConfig& config) { return run_flow(theta0, basis, V, config); },
      py::arg("theta0"), py::arg("basis"), py::arg("potential"), py::arg("config"));

  py::class_<AffineState>(m, "AffineState")
      .def_readonly("gamma", &AffineState::gamma)
      .def_readonly("shift", &AffineState::shift)
      .def_readonly("time", &AffineState::time);

  m.def("affine_rhs", [](const AffineState& s, const Potential& V) {
    const AffineRhs rhs = affine_rhs(s, V);
    return py::make_tuple(rhs.dgamma, rhs.dshift);
  });
  m.def("integrate_affine", &integrate_affine, py::arg("sigma0"), py::arg("mu0"),
        py::arg("potential"), py::arg("dt"), py::arg("horizon"));
  m.def("gaussian_moments", [](const AffineState& s) {
    const GaussianMoments mom = gaussian_moments(s);
    return py::make_tuple(mom.mean, mom.covariance);
  });
  m.def("gaussian_free_energy", &gaussian_free_energy);
  m.def("spd_sqrt", &spd_sqrt);

  py::class_<GridDensity>(m, "GridDensity")
      .def_readonly("lo", &GridDensity::lo)
      .def_readonly("hi", &GridDensity::hi)
      .def_readonly("values", &GridDensity::values)
      .def_property_readonly("dx", &GridDensity::dx)
      .def("mass", &GridDensity::mass)
      .def("mean", &GridDensity::mean)
      .def("variance", &GridDensity::variance);

  m.def("discretize_density", &discretize_density);
  m.def("fd_stable_dt", &fd_stable_dt);
  m.def("fd_solve", &fd_solve, py::arg("rho0"), py::arg("potential"), py::arg("dt"),
        py::arg("horizon"));
  m.def(
      "sde_simulate",
      [](int n, const Potential& V, double mean0, double std0, double dt, double horizon,
         std::uint64_t seed) {
        return sde_simulate(
            n, V, [&](NormalStream& s) { return mean0 + std0 * s.next(); }, dt, horizon,
            seed);
      },
      py::arg("n"), py::arg("potential"), py::arg("mean0"), py::arg("std0"),
      py::arg("dt"), py::arg("horizon"), py::arg("seed") = 0);
  m.def("gibbs_density", &gibbs_density, py::arg("potential"), py::arg("lo"),
        py::arg("hi"), py::arg("nodes"));

  m.def("wasserstein1",
        py::overload_cast<const ParticleEnsemble&, const ParticleEnsemble&>(&wasserstein1));
  m.def("wasserstein1",
        py::overload_cast<const ParticleEnsemble&, const GridDensity&>(&wasserstein1));
  m.def("wasserstein1",
        py::overload_cast<const GridDensity&, const GridDensity&>(&wasserstein1));

  m.def("run_experiment_file",
        [](const std::filesystem::path& config_path, const std::filesystem::path& outdir) {
          const ExperimentConfig config = load_config(config_path);
          const RunArtifacts art = run_experiment(config, outdir);
          return py::make_tuple(art.ok, art.error);
        });
  m.def("default_config_text", [] { return serialize_config(default_config()); });
}
