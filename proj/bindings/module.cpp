#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "specsense/combinatorics.hpp"
#include "specsense/dynamic_selection.hpp"
#include "specsense/errors.hpp"
#include "specsense/experiment.hpp"
#include "specsense/matrix_diagnostics.hpp"
#include "specsense/metrics.hpp"
#include "specsense/recovery.hpp"
#include "specsense/rng.hpp"
#include "specsense/scenario.hpp"
#include "specsense/selection.hpp"

namespace py = pybind11;
using namespace specsense;

namespace {

std::vector<int> as_indices(const std::vector<int>& v) { return v; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "E-optimal sensor selection and compressive spectrum sensing";

  py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
  py::register_exception<DegenerateDistributionError>(
      m, "DegenerateDistributionError", PyExc_RuntimeError);
  py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError",
                                              PyExc_RuntimeError);

  py::class_<Point>(m, "Point")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point::x)
      .def_readwrite("y", &Point::y)
      .def("__repr__", [](const Point& p) {
        return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
      });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<int, double>(), py::arg("side_count") = 6,
           py::arg("area_extent") = 10.0)
      .def_readwrite("side_count", &GridSpec::side_count)
      .def_readwrite("area_extent", &GridSpec::area_extent)
      .def("point_count", &GridSpec::point_count)
      .def("point", &GridSpec::point, py::arg("index"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("grid", &Scenario::grid)
      .def_readonly("sensor_positions", &Scenario::sensor_positions)
      .def_readonly("gain", &Scenario::gain)
      .def_readonly("true_power", &Scenario::true_power)
      .def_readonly("sparsity", &Scenario::sparsity)
      .def_readonly("noise_std", &Scenario::noise_std)
      .def_readonly("seed", &Scenario::seed)
      .def("sensor_count", &Scenario::sensor_count)
      .def("grid_point_count", &Scenario::grid_point_count)
      .def("to_json", [](const Scenario& sc) { return scenario_to_json(sc).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return scenario_from_json(nlohmann::json::parse(text));
      });

  py::class_<MeasurementSet>(m, "MeasurementSet")
      .def_readonly("values", &MeasurementSet::values)
      .def_readonly("per_sensor_noise", &MeasurementSet::per_sensor_noise);

  m.def("build_scenario", &build_scenario, py::arg("grid"),
        py::arg("sensor_count"), py::arg("sparsity"), py::arg("snr_db"),
        py::arg("seed"));
  m.def("gain_between", &gain_between, py::arg("p"), py::arg("q"),
        py::arg("d_floor") = 0.01);
  m.def("distance_floor", &distance_floor, py::arg("area_extent"));
  m.def("sample_measurements", &sample_measurements, py::arg("scenario"),
        py::arg("seed"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("trial"),
        py::arg("block"), py::arg("purpose"));

  py::class_<RipReport>(m, "RipReport")
      .def_readonly("order", &RipReport::order)
      .def_readonly("delta_lower", &RipReport::delta_lower)
      .def_readonly("delta_upper", &RipReport::delta_upper)
      .def_readonly("argmin_subset", &RipReport::argmin_subset);

  py::class_<SubsetSpectrum>(m, "SubsetSpectrum")
      .def_readonly("subset", &SubsetSpectrum::subset)
      .def_readonly("min_eig", &SubsetSpectrum::min_eig)
      .def_readonly("volume", &SubsetSpectrum::volume);

  m.def("row_gram_min_eig",
        [](const Eigen::MatrixXd& a, const std::vector<int>& rows) {
          return row_gram_min_eig(a, as_indices(rows));
        },
        py::arg("A"), py::arg("rows"));
  m.def("projection_residual",
        [](const Eigen::MatrixXd& a, const std::vector<int>& rows) {
          return projection_residual(a, as_indices(rows));
        },
        py::arg("A"), py::arg("rows"));
  m.def("rip_constants", &rip_constants, py::arg("phi"), py::arg("order"));
  m.def("spark", &spark, py::arg("A"));
  m.def("mean_min_eig", &mean_min_eig, py::arg("A"), py::arg("subset_columns"));
  m.def("best_rank_k_error", &best_rank_k_error, py::arg("A"), py::arg("rank"));
  m.def("subset_spectrum",
        [](const Eigen::MatrixXd& a, const std::vector<int>& rows) {
          return subset_spectrum(a, as_indices(rows));
        },
        py::arg("A"), py::arg("rows"));

  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readonly("selected", &SelectionResult::selected)
      .def_readonly("objective_trace", &SelectionResult::objective_trace)
      .def_readonly("method", &SelectionResult::method)
      .def_readonly("seed", &SelectionResult::seed);

  py::enum_<SelectionObjective>(m, "SelectionObjective")
      .value("MIN_EIG", SelectionObjective::MinEig)
      .value("LOG_DET", SelectionObjective::LogDet);

  py::class_<SubsetDistribution>(m, "SubsetDistribution")
      .def_readonly("subset_size", &SubsetDistribution::subset_size)
      .def_readonly("subsets", &SubsetDistribution::subsets)
      .def_readonly("probabilities", &SubsetDistribution::probabilities);

  py::class_<EoptBoundDiagnostic>(m, "EoptBoundDiagnostic")
      .def_readonly("expected_residual", &EoptBoundDiagnostic::expected_residual)
      .def_readonly("bound_without_constant",
                    &EoptBoundDiagnostic::bound_without_constant);

  m.def("greedy_eoptimal", &greedy_eoptimal, py::arg("A"), py::arg("k"),
        py::arg("init") = std::nullopt, py::arg("seed") = 0);
  m.def("greedy_doptimal", &greedy_doptimal, py::arg("A"), py::arg("k"),
        py::arg("init") = std::nullopt, py::arg("seed") = 0);
  m.def("random_selection", &random_selection, py::arg("sensor_count"),
        py::arg("k"), py::arg("seed"));
  m.def("oracle_best_subset", &oracle_best_subset, py::arg("A"), py::arg("k"),
        py::arg("objective") = SelectionObjective::MinEig);
  m.def("volume_distribution", &volume_distribution, py::arg("A"), py::arg("k"));
  m.def("eoptimal_distribution", &eoptimal_distribution, py::arg("A"),
        py::arg("k"));
  m.def("expected_projection_error", &expected_projection_error, py::arg("A"),
        py::arg("dist"));
  m.def("sample_subset", &sample_subset, py::arg("dist"), py::arg("seed"));
  m.def("volume_sample_selection", &volume_sample_selection, py::arg("A"),
        py::arg("k"), py::arg("seed"));
  m.def("eopt_sample_selection", &eopt_sample_selection, py::arg("A"),
        py::arg("k"), py::arg("seed"));
  m.def("accumulated_log_det",
        [](const Eigen::MatrixXd& a, const std::vector<int>& rows, double ridge) {
          return accumulated_log_det(a, as_indices(rows), ridge);
        },
        py::arg("A"), py::arg("rows"), py::arg("ridge") = kDoptimalRidge);
  m.def("eoptimal_bound_diagnostic", &eoptimal_bound_diagnostic, py::arg("A"),
        py::arg("k"));

  py::class_<LassoConfig>(m, "LassoConfig")
      .def(py::init<>())
      .def_readwrite("lambda_", &LassoConfig::lambda)
      .def_readwrite("max_iterations", &LassoConfig::max_iterations)
      .def_readwrite("epsilon_floor", &LassoConfig::epsilon_floor)
      .def_readwrite("tolerance", &LassoConfig::tolerance)
      .def_readwrite("lambda_scale", &LassoConfig::lambda_scale);

  py::class_<RecoveryResult>(m, "RecoveryResult")
      .def_readonly("estimate", &RecoveryResult::estimate)
      .def_readonly("iterations", &RecoveryResult::iterations)
      .def_readonly("converged", &RecoveryResult::converged)
      .def_readonly("final_objective", &RecoveryResult::final_objective)
      .def_readonly("support", &RecoveryResult::support)
      .def_readonly("objective_trace", &RecoveryResult::objective_trace);

  m.def("irls_lasso",
        [](const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
           const std::vector<int>& selection, const LassoConfig& cfg) {
          return irls_lasso(a, y, as_indices(selection), cfg);
        },
        py::arg("A"), py::arg("y"), py::arg("selection"), py::arg("config"));
  m.def("default_lasso_lambda",
        [](const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
           const std::vector<int>& selection, double scale) {
          return default_lasso_lambda(a, y, as_indices(selection), scale);
        },
        py::arg("A"), py::arg("y"), py::arg("selection"), py::arg("scale") = 0.01);
  m.def("ml_estimate", &ml_estimate, py::arg("A"), py::arg("y"));
  m.def("ml_covariance", &ml_covariance, py::arg("A"), py::arg("noise_variance"));

  py::class_<ReliabilityState>(m, "ReliabilityState")
      .def_static("fresh", &ReliabilityState::fresh, py::arg("y0"),
                  py::arg("forgetting"))
      .def_readwrite("r", &ReliabilityState::r)
      .def_readwrite("u", &ReliabilityState::u)
      .def_readwrite("t_last", &ReliabilityState::t_last)
      .def_readwrite("y_last", &ReliabilityState::y_last)
      .def_readwrite("forgetting", &ReliabilityState::forgetting);

  py::class_<OnlineConfig>(m, "OnlineConfig")
      .def(py::init<>())
      .def_readwrite("active_count", &OnlineConfig::active_count)
      .def_readwrite("low_rate_denominator", &OnlineConfig::low_rate_denominator)
      .def_readwrite("gamma", &OnlineConfig::gamma)
      .def_readwrite("blocks", &OnlineConfig::blocks)
      .def_readwrite("forgetting", &OnlineConfig::forgetting)
      .def_readwrite("lasso", &OnlineConfig::lasso)
      .def_readwrite("seed", &OnlineConfig::seed);

  py::class_<TimeBlockRecord>(m, "TimeBlockRecord")
      .def_readonly("t", &TimeBlockRecord::t)
      .def_readonly("active_set", &TimeBlockRecord::active_set)
      .def_readonly("estimate", &TimeBlockRecord::estimate)
      .def_readonly("reliability", &TimeBlockRecord::reliability)
      .def_readonly("sampled_low_rate", &TimeBlockRecord::sampled_low_rate);

  py::class_<TruthSegment>(m, "TruthSegment")
      .def(py::init([](int first, int last, const Eigen::VectorXd& power) {
             return TruthSegment{first, last, power};
           }),
           py::arg("first_block"), py::arg("last_block"), py::arg("power"))
      .def_readwrite("first_block", &TruthSegment::first_block)
      .def_readwrite("last_block", &TruthSegment::last_block)
      .def_readwrite("power", &TruthSegment::power);

  m.def("predict_measurement", &predict_measurement, py::arg("A"),
        py::arg("sensor"), py::arg("x_prev"));
  m.def("update_reliability", &update_reliability, py::arg("state"),
        py::arg("t"), py::arg("A"), py::arg("x_prev"));
  m.def("reliable_greedy_select", &reliable_greedy_select, py::arg("A"),
        py::arg("unreliability"), py::arg("k"), py::arg("gamma"),
        py::arg("seed") = 0, py::arg("init") = std::nullopt);
  m.def("low_rate_schedule", &low_rate_schedule, py::arg("sensor_count"),
        py::arg("n_l"), py::arg("t"));
  m.def("run_online",
        [](const Scenario& sc, const std::vector<TruthSegment>& schedule,
           const OnlineConfig& cfg) { return run_online(sc, schedule, cfg); },
        py::arg("scenario"), py::arg("truth_schedule"), py::arg("config"));

  py::class_<ReliabilityMap>(m, "ReliabilityMap")
      .def_readonly("width", &ReliabilityMap::width)
      .def_readonly("height", &ReliabilityMap::height)
      .def_readonly("values", &ReliabilityMap::values)
      .def_readonly("extent", &ReliabilityMap::extent)
      .def("to_pgm", [](const ReliabilityMap& map) { return to_pgm_string(map); })
      .def("to_json",
           [](const ReliabilityMap& map) { return reliability_map_to_json(map).dump(); });

  m.def("support_of", &support_of, py::arg("x"), py::arg("tau") = 0.05);
  m.def("recovery_success", &recovery_success, py::arg("x_hat"),
        py::arg("x_true"), py::arg("tau") = 0.05);
  m.def("normalized_error", &normalized_error, py::arg("x_hat"), py::arg("x_true"));
  m.def("spurious_power",
        [](const Eigen::VectorXd& x_hat, const std::vector<int>& support) {
          return spurious_power(x_hat, support);
        },
        py::arg("x_hat"), py::arg("true_support"));
  m.def("reliability_raster", &reliability_raster, py::arg("scenario"),
        py::arg("r"), py::arg("resolution"));
  m.def("mean_reliability", &mean_reliability, py::arg("r"));

  m.attr("RELIABILITY_FLOOR") = kReliabilityFloor;
  m.attr("SUBSET_ENUMERATION_CAP") = kSubsetEnumerationCap;
}
