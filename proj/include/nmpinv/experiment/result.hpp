#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nmpinv/plantsim/closed_loop.hpp"

namespace nmpinv::experiment {

namespace method {
inline constexpr const char* kBaseline = "baseline";
inline constexpr const char* kExact    = "M1_exact_dnn";
inline constexpr const char* kZos      = "M2_zos";
inline constexpr const char* kApprox   = "M3_approx_dnn";
inline constexpr const char* kAblation = "ablation_past_u";
}  // namespace method

struct ExperimentResult {
    std::string scenario;
    std::string method;
    std::vector<double> t;
    std::vector<double> y_d;
    std::vector<double> u;  // position reference sent to the baseline
    std::vector<double> y;
    double eval_from = 0.0;  // seconds; samples with t >= eval_from are scored
    double rms       = 0.0;  // NaN when diverged
    std::optional<double> reduction_pct;
    bool diverged          = false;
    double divergence_time = 0.0;
    std::uint64_t seed     = 0;
    nlohmann::json metadata = nlohmann::json::object();
};

// sqrt(mean((y - y_d)^2)) over samples with t >= from. Throws EmptyWindow.
double rms_error(const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& y_d, double from);
// Multi-axis samples: Euclidean norm of the per-sample error.
double rms_error(const std::vector<double>& t, const std::vector<Eigen::VectorXd>& y,
                 const std::vector<Eigen::VectorXd>& y_d, double from);

double reduction_pct(double rms_method, double rms_baseline);

ExperimentResult make_result(const std::string& scenario, const std::string& method, const plantsim::Trajectory& desired,
                             const plantsim::Trace& trace, double eval_from, std::uint64_t seed);

// Fills reduction_pct of every non-baseline, non-diverged result from the baseline of its scenario.
void attach_reductions(std::vector<ExperimentResult>& results);

nlohmann::json summary_json(const std::vector<ExperimentResult>& results);

// Writes <scenario>__<method>.csv traces and summary.json into dir. Throws IoError.
void export_results(const std::vector<ExperimentResult>& results, const std::string& dir);

// Reads back what export_results wrote (traces and summary fields).
std::vector<ExperimentResult> read_results(const std::string& dir);

}  // namespace nmpinv::experiment
