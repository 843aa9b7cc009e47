#pragma once

#include <nlohmann/json.hpp>

#include <vector>

#include "nmpinv/plantsim/closed_loop.hpp"

namespace nmpinv::service {

struct PreprocessOptions {
    double sample_time   = 0.015;
    int smoothing_window = 5;  // odd; 1 disables smoothing
    double workspace     = 3.0;
    double max_duration  = 120.0;
    double rest_position = 0.0;
};

// Raw drawing: strictly increasing times and one value series per axis.
struct Drawing {
    std::vector<double> t;
    std::vector<std::vector<double>> axes;
};

struct PreparedDrawing {
    std::vector<plantsim::Trajectory> axes;
    std::vector<double> shift;  // per axis, subtracted to move the start onto the rest position
    nlohmann::json metadata;
};

// Natural cubic spline through (t, v) evaluated at `at` (clamped to the data range).
std::vector<double> natural_cubic_resample(const std::vector<double>& t, const std::vector<double>& v,
                                           const std::vector<double>& at);

// Centered moving average whose window shrinks symmetrically near the ends.
std::vector<double> centered_moving_average(const std::vector<double>& v, int window);

// Resample to the sample time, smooth, clamp to the workspace, shift the start to rest.
// Throws BadDrawing.
PreparedDrawing preprocess_drawing(const Drawing& drawing, const PreprocessOptions& options);

}  // namespace nmpinv::service
