#include "nmpinv/service/drawing.hpp"

#include <algorithm>
#include <cmath>

#include "nmpinv/errors.hpp"

namespace nmpinv::service {

std::vector<double> natural_cubic_resample(const std::vector<double>& t, const std::vector<double>& v,
                                           const std::vector<double>& at)
{
    const std::size_t n = t.size();
    if (n < 2 || v.size() != n) throw BadDrawing("spline needs at least two points and matching series");
    // second derivatives m with m[0] = m[n-1] = 0 (Thomas algorithm on the interior)
    std::vector<double> m(n, 0.0);
    if (n > 2) {
        std::vector<double> diag(n - 2), rhs(n - 2), upper(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
            diag[i - 1]  = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1]   = 6.0 * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0);
        }
        for (std::size_t i = 1; i < n - 2; ++i) {
            const double lower = t[i + 1] - t[i];  // h of row i, left neighbour
            const double w     = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i-- > 0;) {
            const double next = i + 1 < n - 2 ? m[i + 2] : 0.0;
            m[i + 1]          = (rhs[i] - upper[i] * next) / diag[i];
        }
    }
    std::vector<double> out(at.size());
    std::size_t seg = 0;
    for (std::size_t j = 0; j < at.size(); ++j) {
        const double x = std::clamp(at[j], t.front(), t.back());
        if (x < t[seg]) seg = 0;
        while (seg + 2 < n && x > t[seg + 1]) ++seg;
        const double h = t[seg + 1] - t[seg];
        const double a = (t[seg + 1] - x) / h, b = (x - t[seg]) / h;
        out[j] = a * v[seg] + b * v[seg + 1] + ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * h * h / 6.0;
    }
    return out;
}

std::vector<double> centered_moving_average(const std::vector<double>& v, int window)
{
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("smoothing window must be odd and positive");
    const long n    = static_cast<long>(v.size());
    const long half = window / 2;
    std::vector<double> out(v.size());
    for (long k = 0; k < n; ++k) {
        const long h = std::min({half, k, n - 1 - k});
        double s     = 0.0;
        for (long i = k - h; i <= k + h; ++i) s += v[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(k)] = s / static_cast<double>(2 * h + 1);
    }
    return out;
}

PreparedDrawing preprocess_drawing(const Drawing& d, const PreprocessOptions& o)
{
    if (d.t.size() < 2) throw BadDrawing("a drawing needs at least two points");
    if (d.axes.empty()) throw BadDrawing("a drawing needs at least one value axis");
    for (const auto& a : d.axes)
        if (a.size() != d.t.size()) throw BadDrawing("every point needs a value for every axis");
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        if (!std::isfinite(d.t[i])) throw BadDrawing("non-finite time");
        for (const auto& a : d.axes)
            if (!std::isfinite(a[i])) throw BadDrawing("non-finite value");
        if (i > 0 && !(d.t[i] > d.t[i - 1])) throw BadDrawing("times must be strictly increasing");
    }
    const double duration = d.t.back() - d.t.front();
    if (duration > o.max_duration)
        throw BadDrawing("drawing lasts " + std::to_string(duration) + " s, more than the " +
                         std::to_string(o.max_duration) + " s limit");
    if (!(o.sample_time > 0.0)) throw std::invalid_argument("sample time must be positive");
    if (o.smoothing_window < 1 || o.smoothing_window % 2 == 0) throw BadDrawing("smoothing window must be odd and positive");
    if (!(o.workspace > 0.0)) throw BadDrawing("workspace must be positive");

    const auto steps = static_cast<std::size_t>(std::floor(duration / o.sample_time + 1e-9)) + 1;
    std::vector<double> at(steps);
    for (std::size_t k = 0; k < steps; ++k) at[k] = d.t.front() + o.sample_time * static_cast<double>(k);

    PreparedDrawing out;
    for (const auto& a : d.axes) {
        std::vector<double> v = centered_moving_average(natural_cubic_resample(d.t, a, at), o.smoothing_window);
        for (double& x : v) x = std::clamp(x, -o.workspace, o.workspace);
        const double shift = v.front() - o.rest_position;
        for (double& x : v) x -= shift;
        out.shift.push_back(shift);
        out.axes.push_back(plantsim::Trajectory::from_positions(o.sample_time, std::move(v)));
    }
    out.metadata = {{"interpolation", "natural_cubic_spline"},
                    {"sample_time", o.sample_time},
                    {"smoothing", "centered_moving_average"},
                    {"smoothing_window", o.smoothing_window},
                    {"workspace", o.workspace},
                    {"rest_position", o.rest_position},
                    {"shift", out.shift},
                    {"samples", steps}};
    return out;
}

}  // namespace nmpinv::service
