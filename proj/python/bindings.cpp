#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <optional>
#include <string>

#include "insar/bp_imaging.hpp"
#include "insar/error.hpp"
#include "insar/experiment.hpp"
#include "insar/forward_model.hpp"
#include "insar/io.hpp"
#include "insar/metrics.hpp"
#include "insar/solver.hpp"

namespace py = pybind11;
using namespace insar;

namespace {

using ComplexArray = py::array_t<cdouble, py::array::c_style | py::array::forcecast>;
using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <class T>
Grid<T> to_grid(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw ShapeError("expected a 2-D array, got " + std::to_string(a.ndim()) + "-D");
    Grid<T> g(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), g.data());
    return g;
}

template <class T>
py::array_t<T> to_array(const Grid<T>& g) {
    py::array_t<T> a({g.rows(), g.cols()});
    std::copy(g.data(), g.data() + g.size(), a.mutable_data());
    return a;
}

AntennaId antenna_of(const std::string& name) {
    if (name == "master") return AntennaId::Master;
    if (name == "slave") return AntennaId::Slave;
    throw ConfigError("antenna must be 'master' or 'slave', got '" + name + "'");
}

SamplingMask mask_of(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw ShapeError("mask must be 1-D");
    SamplingMask m;
    m.kept_pulses.assign(a.data(), a.data() + a.size());
    for (auto& v : m.kept_pulses) v = v != 0;
    m.fraction = m.kept_pulses.empty() ? 0.0 : double(m.kept_count()) / double(m.kept_pulses.size());
    return m;
}

py::array_t<std::uint8_t> mask_array(const SamplingMask& m) {
    py::array_t<std::uint8_t> a(static_cast<py::ssize_t>(m.kept_pulses.size()));
    std::copy(m.kept_pulses.begin(), m.kept_pulses.end(), a.mutable_data());
    return a;
}

py::dict metrics_dict(const PhaseMetrics& m) {
    py::dict d;
    d["rmse_rad"] = m.rmse_rad;
    d["coherence"] = m.mean_coherence;
    d["residues"] = m.residue_count;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Back-projection InSAR imaging with sparse interferogram reconstruction";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<IndexError>(m, "GridIndexError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<AcquisitionGeometry>(m, "AcquisitionGeometry")
        .def(py::init<>())
        .def_readwrite("altitude", &AcquisitionGeometry::altitude)
        .def_readwrite("velocity", &AcquisitionGeometry::velocity)
        .def_readwrite("baseline_length", &AcquisitionGeometry::baseline_length)
        .def_readwrite("baseline_tilt", &AcquisitionGeometry::baseline_tilt)
        .def_readwrite("incidence_angle", &AcquisitionGeometry::incidence_angle)
        .def_readwrite("carrier_frequency", &AcquisitionGeometry::carrier_frequency)
        .def_readwrite("bandwidth", &AcquisitionGeometry::bandwidth)
        .def_readwrite("sample_rate", &AcquisitionGeometry::sample_rate)
        .def_readwrite("prf", &AcquisitionGeometry::prf)
        .def_readwrite("pulse_count", &AcquisitionGeometry::pulse_count)
        .def_readwrite("range_sample_count", &AcquisitionGeometry::range_sample_count)
        .def_readwrite("reference_range", &AcquisitionGeometry::reference_range)
        .def_property_readonly("wavelength", &AcquisitionGeometry::wavelength)
        .def("validate", &AcquisitionGeometry::validate);

    py::class_<ImagingGrid>(m, "ImagingGrid")
        .def(py::init<>())
        .def_readwrite("rows", &ImagingGrid::rows)
        .def_readwrite("cols", &ImagingGrid::cols)
        .def_readwrite("spacing", &ImagingGrid::spacing)
        .def_readwrite("origin", &ImagingGrid::origin)
        .def("node", &ImagingGrid::node);

    py::class_<Experiment>(m, "Experiment")
        .def_readonly("geometry", &Experiment::geometry)
        .def_readonly("grid", &Experiment::grid)
        .def_property_readonly("upsample_factor",
                               [](const Experiment& e) { return e.config.imaging.upsample_factor; })
        .def_property_readonly("coherence_window",
                               [](const Experiment& e) { return e.config.imaging.coherence_window; })
        .def("manifest", &manifest_json);

    m.def("default_config_text", &default_config_text);
    m.def(
        "experiment",
        [](const std::optional<std::string>& text, std::optional<std::uint64_t> seed) {
            ExperimentConfig c = parse_config(text ? *text : default_config_text());
            if (seed) c.override_seed(*seed);
            return resolve(c);
        },
        py::arg("config_text") = py::none(), py::arg("seed") = py::none(),
        "Parse config text (defaults when omitted) and resolve it.");
    m.def(
        "load_experiment",
        [](const std::filesystem::path& path) { return resolve(load_config(path)); },
        py::arg("path"));

    m.def(
        "simulate",
        [](const Experiment& e) {
            const Simulation sim = simulate(e);
            py::dict d;
            d["master"] = to_array(sim.master.data);
            d["slave"] = to_array(sim.slave.data);
            d["ideal_phase"] = to_array(sim.truth.phase);
            d["height"] = to_array(sim.scene.height);
            d["mask"] = mask_array(sim.mask);
            return d;
        },
        py::arg("experiment"), "Scene, ideal phase, mask and masked echoes of both antennas.");

    m.def(
        "backproject",
        [](const ComplexArray& echo, const AcquisitionGeometry& geom, const std::string& antenna,
           std::size_t upsample_factor, const ImagingGrid& grid) {
            const AntennaId a = antenna_of(antenna);
            return to_array(bp_image(EchoMatrix{to_grid(echo), a}, geom, a, upsample_factor, grid).data);
        },
        py::arg("echo"), py::arg("geometry"), py::arg("antenna"), py::arg("upsample_factor"),
        py::arg("grid"));

    m.def(
        "bp_interferogram",
        [](const Experiment& e, const ComplexArray& master, const ComplexArray& slave) {
            const BpResult r = run_bp(e, EchoMatrix{to_grid(master), AntennaId::Master},
                                      EchoMatrix{to_grid(slave), AntennaId::Slave});
            return py::make_tuple(to_array(r.master.data), to_array(r.slave.data),
                                  to_array(r.interferogram.data));
        },
        py::arg("experiment"), py::arg("master"), py::arg("slave"),
        "Returns (master image, slave image, interferogram).");

    m.def(
        "reconstruct",
        [](const Experiment& e, const ComplexArray& master, const ComplexArray& slave,
           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& mask,
           std::optional<double> lambda, std::optional<std::size_t> max_iterations) {
            Experiment run = e;
            if (lambda) run.config.solver.lambda = *lambda;
            if (max_iterations) run.config.solver.max_iterations = *max_iterations;
            SolveResult res;
            {
                py::gil_scoped_release release;
                res = run_reconstruction(run, EchoMatrix{to_grid(master), AntennaId::Master},
                                         EchoMatrix{to_grid(slave), AntennaId::Slave}, mask_of(mask));
            }
            py::dict d;
            d["interferogram"] = to_array(res.theta.data);
            d["spectrum"] = to_array(res.theta_f);
            d["data_term"] = res.report.data_term;
            d["penalty"] = res.report.penalty;
            d["lambda"] = res.report.lambda;
            d["step"] = res.report.step_mu;
            d["operator_norm"] = res.report.operator_norm;
            d["sparsity"] = res.report.sparsity;
            d["converged"] = res.report.converged;
            return d;
        },
        py::arg("experiment"), py::arg("master"), py::arg("slave"), py::arg("mask"),
        py::arg("lambda_") = py::none(), py::arg("max_iterations") = py::none());

    py::class_<ObservationOperator>(m, "ObservationOperator")
        .def(py::init([](const AcquisitionGeometry& geom, const ComplexArray& slave_image,
                         const ImagingGrid& grid,
                         const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& mask,
                         std::size_t upsample_factor) {
                 return ObservationOperator(geom, ComplexImage{to_grid(slave_image), grid},
                                            mask_of(mask), upsample_factor);
             }),
             py::arg("geometry"), py::arg("slave_image"), py::arg("grid"), py::arg("mask"),
             py::arg("upsample_factor"))
        .def("forward",
             [](const ObservationOperator& op, const ComplexArray& theta_f) {
                 return to_array(op.apply_forward(to_grid(theta_f)).data);
             })
        .def("adjoint",
             [](const ObservationOperator& op, const ComplexArray& y) {
                 return to_array(op.apply_adjoint(to_grid(y)));
             })
        .def(
            "norm",
            [](const ObservationOperator& op, std::size_t iterations) {
                return operator_norm(op, iterations);
            },
            py::arg("iterations") = 30);

    m.def(
        "range_bin_index",
        [](const AcquisitionGeometry& geom, std::size_t upsample_factor, double range) {
            return range_bin_index(geom, upsample_factor, range);
        },
        py::arg("geometry"), py::arg("upsample_factor"), py::arg("range"));
    m.def("wrap_phase", py::vectorize(&wrap_phase));
    m.def(
        "soft_threshold",
        [](const py::array_t<cdouble, py::array::c_style | py::array::forcecast>& z, double t) {
            const std::vector<cdouble> out =
                soft_threshold(std::span<const cdouble>(z.data(), static_cast<std::size_t>(z.size())), t);
            py::array_t<cdouble> a(z.request().shape);
            std::copy(out.begin(), out.end(), a.mutable_data());
            return a;
        },
        py::arg("z"), py::arg("threshold"));

    m.def(
        "phase_rmse",
        [](const ComplexArray& est, const RealArray& truth) {
            return phase_rmse(to_grid(est), to_grid(truth));
        },
        py::arg("estimate"), py::arg("truth"));
    m.def(
        "mean_coherence",
        [](const ComplexArray& est, const RealArray& truth, std::size_t window) {
            return mean_coherence(to_grid(est), to_grid(truth), window);
        },
        py::arg("estimate"), py::arg("truth"), py::arg("window") = 5);
    m.def(
        "count_residues", [](const RealArray& phase) { return count_residues(to_grid(phase)); },
        py::arg("phase"));
    m.def(
        "evaluate_phase",
        [](const ComplexArray& est, const RealArray& truth, std::size_t window) {
            return metrics_dict(evaluate_phase(to_grid(est), to_grid(truth), window));
        },
        py::arg("estimate"), py::arg("truth"), py::arg("window") = 5);

    m.def(
        "read_grid",
        [](const std::filesystem::path& path) -> py::tuple {
            const io::GridFileHeader h = io::read_grid_header(path);
            if (h.dtype == io::GridDtype::Complex64) {
                return py::make_tuple(to_array(io::read_complex_grid(path)), h.pixel_spacing);
            }
            return py::make_tuple(to_array(io::read_real_grid(path)), h.pixel_spacing);
        },
        py::arg("path"), "Returns (array, pixel_spacing).");
    m.def(
        "write_grid",
        [](const std::filesystem::path& path, const py::array& a, double spacing) {
            if (a.dtype().kind() == 'c') {
                io::write_grid(path, to_grid(ComplexArray::ensure(a)), spacing);
            } else {
                io::write_grid(path, to_grid(RealArray::ensure(a)), spacing);
            }
        },
        py::arg("path"), py::arg("array"), py::arg("pixel_spacing"));
    m.def(
        "export_phase_png",
        [](const ComplexArray& image, const std::filesystem::path& path) {
            io::export_phase_png(to_grid(image), path);
        },
        py::arg("image"), py::arg("path"));
}
