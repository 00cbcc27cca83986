#include "grasspod/baseline.hpp"
#include "grasspod/chart.hpp"
#include "grasspod/cxgboost.hpp"
#include "grasspod/error.hpp"
#include "grasspod/grassmann.hpp"
#include "grasspod/harness.hpp"
#include "grasspod/io.hpp"
#include "grasspod/pdelab.hpp"
#include "grasspod/pod.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace grasspod;

namespace {

py::tuple snapshot_tuple(const SnapshotMatrix& s) { return py::make_tuple(s.data, s.label); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grassmann charts, constrained boosting and snapshot generators";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<NonFiniteError>(m, "NonFiniteError", error.ptr());
  py::register_exception<CutLocusError>(m, "CutLocusError", error.ptr());
  py::register_exception<OutOfChartError>(m, "OutOfChartError", error.ptr());
  py::register_exception<BallViolationError>(m, "BallViolationError", error.ptr());
  py::register_exception<SolverFailure>(m, "SolverFailure", error.ptr());
  py::register_exception<InstabilityError>(m, "InstabilityError", error.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());

  // grassmann
  py::class_<PodBasis>(m, "PodBasis")
      .def(py::init<Matrix, double>(), py::arg("matrix"), py::arg("tol") = kOrthonormalTol)
      .def_static("orthonormalize", &PodBasis::orthonormalize, py::arg("matrix"))
      .def_property_readonly("matrix", &PodBasis::matrix)
      .def_property_readonly("n", &PodBasis::n)
      .def_property_readonly("r", &PodBasis::r)
      .def("__repr__", [](const PodBasis& b) {
        return "PodBasis(n=" + std::to_string(b.n()) + ", r=" + std::to_string(b.r()) + ")";
      });

  m.def(
      "exp_map", [](const PodBasis& base, const Matrix& z) { return exp_map(base, HorizontalLift{z}); },
      py::arg("base"), py::arg("lift"));
  m.def(
      "log_map", [](const PodBasis& base, const PodBasis& target) { return log_map(base, target).z; },
      py::arg("base"), py::arg("target"));
  m.def("principal_angles", &principal_angles, py::arg("a"), py::arg("b"));
  m.def("geodesic_distance", &geodesic_distance, py::arg("a"), py::arg("b"));

  // pod
  py::class_<PodResult>(m, "PodResult")
      .def_readonly("basis", &PodResult::basis)
      .def_readonly("singular_values", &PodResult::singular_values)
      .def_readonly("energy_captured", &PodResult::energy_captured)
      .def_property_readonly("truncation_floor", &PodResult::truncation_floor);
  m.def(
      "compute_pod", [](const Matrix& data, Index rank) { return compute_pod(data, rank); }, py::arg("data"),
      py::arg("rank"));
  m.def("relative_error", &relative_error, py::arg("data"), py::arg("basis"));

  // chart
  py::class_<Chart>(m, "Chart")
      .def(py::init<PodBasis>(), py::arg("reference"))
      .def_property_readonly("reference", &Chart::reference)
      .def_property_readonly("dim", &Chart::dim)
      .def_property_readonly("radius", &Chart::radius)
      .def("apply_f", &Chart::apply_f, py::arg("x"))
      .def("apply_ft", &Chart::apply_ft, py::arg("y"))
      .def("dense_f", &Chart::dense_f);
  m.def("embed", &embed, py::arg("chart"), py::arg("basis"));
  m.def("wrap_back", &wrap_back, py::arg("chart"), py::arg("y"));
  m.def(
      "select_reference",
      [](const std::vector<PodBasis>& bases, const std::string& policy, std::size_t index,
         const std::vector<std::string>& labels, bool drop) {
        const ReferenceChoice c = select_reference(bases, parse_reference_policy(policy), index, labels, drop);
        py::dict out;
        out["index"] = c.index;
        out["max_distance"] = c.max_distance;
        out["excluded"] = c.excluded;
        return out;
      },
      py::arg("bases"), py::arg("policy") = "minimax", py::arg("index") = 0,
      py::arg("labels") = std::vector<std::string>{}, py::arg("drop_unreachable") = false);

  // cxgboost
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("rounds", &TrainConfig::rounds)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("max_depth", &TrainConfig::max_depth)
      .def_readwrite("leaf_penalty", &TrainConfig::leaf_penalty)
      .def_readwrite("l2_penalty", &TrainConfig::l2_penalty)
      .def_readwrite("subsample", &TrainConfig::subsample)
      .def_readwrite("min_samples_leaf", &TrainConfig::min_samples_leaf)
      .def_readwrite("rng_seed", &TrainConfig::rng_seed)
      .def_readwrite("constrained", &TrainConfig::constrained);
  py::class_<Ensemble>(m, "Ensemble")
      .def_property_readonly("tree_count", [](const Ensemble& e) { return e.trees.size(); })
      .def_readonly("output_dim", &Ensemble::output_dim)
      .def_readonly("input_dim", &Ensemble::input_dim)
      .def("predict", &Ensemble::predict, py::arg("theta"));
  m.def(
      "fit",
      [](const Matrix& theta, const Matrix& y, const TrainConfig& cfg) {
        FitTrace trace;
        Ensemble e;
        {
          py::gil_scoped_release release;
          e = fit(EmbeddedDataset{theta, y}, cfg, &trace);
        }
        return py::make_tuple(std::move(e), trace.train_loss);
      },
      py::arg("theta"), py::arg("y"), py::arg("config") = TrainConfig{},
      "Fit on parameters theta (N x d) and embedded targets y (dim x N). Returns (ensemble, train_loss).");

  // baseline
  py::class_<InterpModel>(m, "InterpModel")
      .def(py::init([](Matrix theta, Matrix y, const std::string& scheme) {
             return InterpModel(std::move(theta), std::move(y), parse_interp_scheme(scheme));
           }),
           py::arg("theta"), py::arg("y"), py::arg("scheme") = "auto")
      .def(
          "predict",
          [](const InterpModel& im, const Vector& theta) {
            const InterpPrediction p = im.predict(theta);
            return py::make_tuple(p.y, p.clipped, p.extrapolated);
          },
          py::arg("theta"));

  // pdelab
  py::class_<BurgersSpec>(m, "BurgersSpec")
      .def(py::init<>())
      .def_readwrite("a", &BurgersSpec::a)
      .def_readwrite("nu", &BurgersSpec::nu)
      .def_readwrite("nx", &BurgersSpec::nx)
      .def_readwrite("nt", &BurgersSpec::nt);
  py::class_<BeamSpec>(m, "BeamSpec")
      .def(py::init<>())
      .def_readwrite("mu1", &BeamSpec::mu1)
      .def_readwrite("mu2", &BeamSpec::mu2)
      .def_readwrite("nx", &BeamSpec::nx)
      .def_readwrite("nt", &BeamSpec::nt);
  py::class_<WaveSpec>(m, "WaveSpec")
      .def(py::init<>())
      .def_readwrite("mu1", &WaveSpec::mu1)
      .def_readwrite("mu2", &WaveSpec::mu2)
      .def_readwrite("grid", &WaveSpec::grid)
      .def_readwrite("nt", &WaveSpec::nt);
  m.def(
      "run_burgers", [](const BurgersSpec& s) { return snapshot_tuple(run_burgers(s)); }, py::arg("spec"),
      "Returns (snapshots, label).");
  m.def(
      "run_beam", [](const BeamSpec& s) { return snapshot_tuple(run_beam(s)); }, py::arg("spec"),
      "Returns (snapshots, label).");
  m.def(
      "run_wave", [](const WaveSpec& s) { return snapshot_tuple(run_wave(s)); }, py::arg("spec"),
      "Returns (snapshots, label).");

  // harness and io
  m.def(
      "split_mod3",
      [](std::size_t count) {
        const SplitIndices s = split_mod3(count);
        return py::make_tuple(s.train, s.test);
      },
      py::arg("count"));
  m.def("read_snapshot_file", &read_snapshot_file, py::arg("path"));
  m.def("write_snapshot_file", &write_snapshot_file, py::arg("path"), py::arg("matrix"));
}
