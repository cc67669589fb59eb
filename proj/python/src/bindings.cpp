#include "stirap/criticality.hpp"
#include "stirap/dynamics.hpp"
#include "stirap/errors.hpp"
#include "stirap/observables.hpp"
#include "stirap/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace stirap;

namespace {

Pulse pulse_from(const std::string& name) {
    if (name == "pump") return Pulse::Pump;
    if (name == "rydberg") return Pulse::Rydberg;
    throw InvalidArgument("pulse must be 'pump' or 'rydberg', got '" + name + "'");
}

// rows are times
Eigen::MatrixXcd stacked(const Trajectory& traj) {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(traj.states.size()),
                         traj.states.empty() ? 0 : traj.states.front().amplitudes.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = traj.states[i].amplitudes.transpose();
    return out;
}

py::dict sum_rule_dict(const SectorSumRule& r) {
    py::dict d;
    d["n_r"] = r.n_r;
    d["weight"] = r.weight;
    d["spin_j"] = r.spin_j;
    d["jx2"] = r.jx2;
    d["jy2_plus_jz2"] = r.jy2_plus_jz2;
    d["sum_rule_residual"] = r.sum_rule_residual;
    d["casimir_residual"] = r.casimir_residual;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = "0.1.0";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto invalid = py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
    py::register_exception<GridMismatch>(m, "GridMismatch", invalid.ptr());
    py::register_exception<TrackingLost>(m, "TrackingLost", numerical.ptr());
    py::register_exception<NoInteriorMinimum>(m, "NoInteriorMinimum", numerical.ptr());
    py::register_exception<DegenerateDarkState>(m, "DegenerateDarkState", numerical.ptr());
    py::register_exception<StepSizeUnderflow>(m, "StepSizeUnderflow", numerical.ptr());
    py::register_exception<GapFloorViolation>(m, "GapFloorViolation", numerical.ptr());
    py::register_exception<SectorMixed>(m, "SectorMixed", numerical.ptr());
    py::register_exception<DegeneracyEncountered>(m, "DegeneracyEncountered", numerical.ptr());
    py::register_exception<NotConverged>(m, "NotConverged", numerical.ptr());
    py::register_exception<InsufficientOverlap>(m, "InsufficientOverlap", numerical.ptr());

    py::class_<PulseSchedule>(m, "PulseSchedule")
        .def(py::init([](double omega_max_1, double omega_max_r, double sigma, double t_start_r, double t_start_1) {
                 PulseSchedule p{omega_max_1, omega_max_r, sigma, t_start_r, t_start_1};
                 p.validate();
                 return p;
             }),
             py::arg("omega_max_1") = kTwoPiTenMHz, py::arg("omega_max_r") = kTwoPiTenMHz, py::arg("sigma") = 1.5,
             py::arg("t_start_r") = 0.0, py::arg("t_start_1") = 1.1)
        .def_static("fast", &PulseSchedule::fast_default)
        .def_static("slow", &PulseSchedule::slow_default)
        .def_readwrite("omega_max_1", &PulseSchedule::omega_max_1)
        .def_readwrite("omega_max_r", &PulseSchedule::omega_max_r)
        .def_readwrite("sigma", &PulseSchedule::sigma)
        .def_readwrite("t_start_r", &PulseSchedule::t_start_r)
        .def_readwrite("t_start_1", &PulseSchedule::t_start_1)
        .def_property_readonly("begin", &PulseSchedule::begin)
        .def_property_readonly("end", &PulseSchedule::end)
        .def_property_readonly("duration", &PulseSchedule::duration)
        .def_property_readonly("overlap", [](const PulseSchedule& p) {
            return py::make_tuple(p.overlap_begin(), p.overlap_end());
        })
        .def("validate", &PulseSchedule::validate);

    m.def("pulse_value", [](const PulseSchedule& p, const std::string& which, double t) {
        return pulse_value(p, pulse_from(which), t);
    }, py::arg("schedule"), py::arg("pulse"), py::arg("t"));
    m.def("pulse_derivative", [](const PulseSchedule& p, const std::string& which, double t) {
        return pulse_derivative(p, pulse_from(which), t);
    }, py::arg("schedule"), py::arg("pulse"), py::arg("t"));

    py::class_<CollectiveBasis>(m, "CollectiveBasis")
        .def(py::init<int>(), py::arg("n_atoms"))
        .def_property_readonly("n_atoms", &CollectiveBasis::n_atoms)
        .def_property_readonly("dimension", &CollectiveBasis::dimension)
        .def_property_readonly("states", [](const CollectiveBasis& b) {
            std::vector<std::tuple<int, int, int>> out;
            for (const auto& s : b.states()) out.emplace_back(s.n_g, s.n_e, s.n_r);
            return out;
        })
        .def("index_of", [](const CollectiveBasis& b, int n_g, int n_e, int n_r) {
            return b.index_of({n_g, n_e, n_r});
        });

    py::class_<HamiltonianOperator>(m, "Hamiltonian")
        .def(py::init([](int n_atoms, const PulseSchedule& p) { return HamiltonianOperator(CollectiveBasis(n_atoms), p); }),
             py::arg("n_atoms"), py::arg("schedule") = PulseSchedule::fast_default())
        .def_property_readonly("basis", &HamiltonianOperator::basis)
        .def_property_readonly("schedule", &HamiltonianOperator::pulses)
        .def_property_readonly("dimension", &HamiltonianOperator::dimension)
        .def("at", &HamiltonianOperator::at, py::arg("t"))
        .def("derivative_at", &HamiltonianOperator::derivative_at, py::arg("t"));

    py::class_<SpectralSnapshot>(m, "SpectralSnapshot")
        .def_readonly("t", &SpectralSnapshot::t)
        .def_readonly("eigenvalues", &SpectralSnapshot::eigenvalues)
        .def_readonly("eigenvectors", &SpectralSnapshot::eigenvectors)
        .def_readonly("dark_index", &SpectralSnapshot::dark_index)
        .def_readonly("gap", &SpectralSnapshot::gap)
        .def_property_readonly("dark_vector", [](const SpectralSnapshot& s) { return Eigen::VectorXd(s.dark_vector()); });

    m.def("diagonalize", [](const HamiltonianOperator& op, double t) { return diagonalize(op, t); }, py::arg("op"),
          py::arg("t"));
    m.def("track_dark_state", [](const HamiltonianOperator& op, const std::vector<double>& times) {
        return track_dark_state(op, times);
    }, py::arg("op"), py::arg("times"));
    m.def("dark_gap", &dark_gap, py::arg("op"), py::arg("t"));
    m.def("dark_state_at", [](const HamiltonianOperator& op, double t) { return dark_state_at(op, t); }, py::arg("op"),
          py::arg("t"));

    py::class_<GapProfile>(m, "GapProfile")
        .def_readonly("times", &GapProfile::times)
        .def_readonly("gaps", &GapProfile::gaps)
        .def_readonly("t_c", &GapProfile::t_c)
        .def_readonly("gap_min", &GapProfile::gap_min);

    m.def("find_critical_time", [](const HamiltonianOperator& op, std::optional<std::pair<double, double>> window,
                                   int scan_points, double refine_tol) {
        const TimeWindow w = window ? TimeWindow{window->first, window->second} : overlap_window(op.pulses());
        return find_critical_time(op, w, GapSearchOptions{scan_points, refine_tol});
    }, py::arg("op"), py::arg("window") = py::none(), py::arg("scan_points") = 2000, py::arg("refine_tol") = 1e-4);

    m.def("fit_power_law", [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const ScalingFit f = fit_power_law(xs, ys);
        return py::make_tuple(f.exponent, f.prefactor, f.residual);
    }, py::arg("xs"), py::arg("ys"), "(exponent, prefactor, log-space rms residual)");

    m.def("fit_gap_scaling", [](const std::vector<int>& ns, const PulseSchedule& p) {
        const GapScaling s = fit_gap_scaling(ns, p);
        py::dict d;
        d["exponent"] = s.fit.exponent;
        d["prefactor"] = s.fit.prefactor;
        d["residual"] = s.fit.residual;
        d["profiles"] = s.profiles;
        return d;
    }, py::arg("atom_numbers"), py::arg("schedule") = PulseSchedule::fast_default());

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_property_readonly("states", &stacked)
        .def_readonly("worst_local_error", &Trajectory::worst_local_error)
        .def_readonly("substeps", &Trajectory::substeps)
        .def_property_readonly("norm_drift", &Trajectory::norm_drift);

    m.def("propagate", [](const HamiltonianOperator& op, const Eigen::VectorXcd& psi0, const std::vector<double>& times,
                          bool counterdiabatic, double max_substep, double local_tol) {
        if (times.empty()) throw InvalidArgument("times must not be empty");
        const QuantumState init{psi0, times.front()};
        const PropagationControls controls{max_substep, local_tol};
        if (counterdiabatic) return propagate_counterdiabatic(CounterdiabaticDrive(op), init, times, controls);
        return propagate(op, init, times, controls);
    }, py::arg("op"), py::arg("psi0"), py::arg("times"), py::arg("counterdiabatic") = false,
          py::arg("max_substep") = 2e-3, py::arg("local_tol") = 1e-11);

    m.def("overlap_fidelity", [](const Trajectory& traj, const std::vector<SpectralSnapshot>& path) {
        return overlap_fidelity(traj, path);
    }, py::arg("trajectory"), py::arg("dark_path"));

    py::class_<SpinOperatorSet>(m, "SpinOperators")
        .def_readonly("n_atoms", &SpinOperatorSet::n_atoms)
        .def_readonly("jx", &SpinOperatorSet::jx)
        .def_readonly("jy", &SpinOperatorSet::jy)
        .def_readonly("jz", &SpinOperatorSet::jz)
        .def_readonly("rydberg_number", &SpinOperatorSet::rydberg_number);

    m.def("spin_operators", [](int n) { return build_spin_operators(CollectiveBasis(n)); }, py::arg("n_atoms"));
    m.def("variance", [](const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& a) { return variance(psi, a); },
          py::arg("psi"), py::arg("operator"));
    m.def("effective_size", [](const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
        return effective_size(psi, ops);
    }, py::arg("psi"), py::arg("ops"));
    m.def("rydberg_parity", [](const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
        return rydberg_parity(psi, ops);
    }, py::arg("psi"), py::arg("ops"));
    m.def("total_spin_sum_rule", [](const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
        return sum_rule_dict(total_spin_sum_rule(psi, ops));
    }, py::arg("psi"), py::arg("ops"));

    py::class_<RateProfile>(m, "RateProfile")
        .def_readonly("times", &RateProfile::times)
        .def_readonly("rate", &RateProfile::rate)
        .def_readonly("work_fluct", &RateProfile::work_fluct);

    m.def("rate_profile", [](const HamiltonianOperator& op, const std::vector<double>& times, double gap_floor) {
        return rate_profile(op, times, gap_floor);
    }, py::arg("op"), py::arg("times"), py::arg("gap_floor") = kDefaultGapFloor);

    m.def("integrated_work_scaling", [](const std::vector<int>& ns, const PulseSchedule& p, double tau) {
        const WorkScaling w = integrated_work_scaling(ns, p, tau);
        std::vector<double> integrals;
        for (const auto& i : w.integrals) integrals.push_back(i.integral);
        py::dict d;
        d["exponent"] = w.fit.exponent;
        d["prefactor"] = w.fit.prefactor;
        d["residual"] = w.fit.residual;
        d["integrals"] = integrals;
        return d;
    }, py::arg("atom_numbers"), py::arg("schedule") = PulseSchedule::fast_default(), py::arg("tau") = 4.1);

    py::class_<SusceptibilityProfile>(m, "SusceptibilityProfile")
        .def_readonly("n_atoms", &SusceptibilityProfile::n_atoms)
        .def_readonly("epsilon", &SusceptibilityProfile::epsilon)
        .def_readonly("times", &SusceptibilityProfile::times)
        .def_readonly("s", &SusceptibilityProfile::s)
        .def_readonly("s_half", &SusceptibilityProfile::s_half)
        .def_readonly("t_n", &SusceptibilityProfile::t_n)
        .def_readonly("s_min", &SusceptibilityProfile::s_min);

    m.def("fidelity_susceptibility", [](const HamiltonianOperator& op, const std::vector<double>& times,
                                        double epsilon) {
        SusceptibilityOptions o;
        o.epsilon = epsilon;
        return fidelity_susceptibility(op, times, o);
    }, py::arg("op"), py::arg("times"), py::arg("epsilon") = 0.0);
    m.def("susceptibility_near_minimum", [](const HamiltonianOperator& op, double half_window, int points) {
        MinimumScanOptions o;
        o.half_window = half_window;
        o.points = points;
        return susceptibility_near_minimum(op, o);
    }, py::arg("op"), py::arg("half_window") = 4.0, py::arg("points") = 401);

    py::class_<CollapseReport>(m, "CollapseReport")
        .def_readonly("amplitude_exponent", &CollapseReport::amplitude_exponent)
        .def_readonly("n_atoms", &CollapseReport::n_atoms)
        .def_readonly("x", &CollapseReport::x)
        .def_readonly("curves", &CollapseReport::curves)
        .def_readonly("max_rms", &CollapseReport::max_rms);

    m.def("scaling_collapse", [](const std::vector<SusceptibilityProfile>& profiles, double amplitude_exponent,
                                 double half_window) {
        CollapseOptions o;
        o.amplitude_exponent = amplitude_exponent;
        o.half_window = half_window;
        return scaling_collapse(profiles, o);
    }, py::arg("profiles"), py::arg("amplitude_exponent") = 2.0, py::arg("half_window") = 4.0);
}
