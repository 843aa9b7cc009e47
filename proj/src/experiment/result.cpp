#include "nmpinv/experiment/result.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "nmpinv/errors.hpp"

namespace nmpinv::experiment {

namespace fs = std::filesystem;

double rms_error(const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& y_d, double from)
{
    if (y.size() != t.size() || y_d.size() < t.size()) throw DimensionMismatch("rms_error: series lengths differ");
    double se     = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < from - 1e-9) continue;
        se += (y[k] - y_d[k]) * (y[k] - y_d[k]);
        ++n;
    }
    if (n == 0) throw EmptyWindow("no samples at or after t = " + std::to_string(from) + " s");
    return std::sqrt(se / static_cast<double>(n));
}

double rms_error(const std::vector<double>& t, const std::vector<Eigen::VectorXd>& y,
                 const std::vector<Eigen::VectorXd>& y_d, double from)
{
    if (y.size() != t.size() || y_d.size() < t.size()) throw DimensionMismatch("rms_error: series lengths differ");
    double se     = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < from - 1e-9) continue;
        se += (y[k] - y_d[k]).squaredNorm();
        ++n;
    }
    if (n == 0) throw EmptyWindow("no samples at or after t = " + std::to_string(from) + " s");
    return std::sqrt(se / static_cast<double>(n));
}

double reduction_pct(double rms_method, double rms_baseline) { return 100.0 * (1.0 - rms_method / rms_baseline); }

ExperimentResult make_result(const std::string& scenario, const std::string& method, const plantsim::Trajectory& desired,
                             const plantsim::Trace& trace, double eval_from, std::uint64_t seed)
{
    ExperimentResult r;
    r.scenario        = scenario;
    r.method          = method;
    r.t               = trace.t;
    r.y_d.assign(desired.pos.begin(), desired.pos.begin() + static_cast<long>(trace.size()));
    r.u               = trace.ref_pos;
    r.y               = trace.y;
    r.eval_from       = eval_from;
    r.diverged        = trace.diverged;
    r.divergence_time = trace.divergence_time;
    r.seed            = seed;
    r.rms = r.diverged ? std::numeric_limits<double>::quiet_NaN() : rms_error(r.t, r.y, r.y_d, eval_from);
    return r;
}

void attach_reductions(std::vector<ExperimentResult>& results)
{
    std::map<std::string, double> base;
    for (const auto& r : results)
        if (r.method == method::kBaseline && !r.diverged) base[r.scenario] = r.rms;
    for (auto& r : results) {
        r.reduction_pct.reset();
        if (r.method == method::kBaseline || r.diverged) continue;
        const auto it = base.find(r.scenario);
        if (it != base.end() && it->second > 0.0) r.reduction_pct = reduction_pct(r.rms, it->second);
    }
}

nlohmann::json summary_json(const std::vector<ExperimentResult>& results)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json row{{"scenario", r.scenario},
                           {"method", r.method},
                           {"rms", r.diverged ? nlohmann::json(nullptr) : nlohmann::json(r.rms)},
                           {"reduction_pct", r.reduction_pct ? nlohmann::json(*r.reduction_pct) : nlohmann::json(nullptr)},
                           {"diverged", r.diverged},
                           {"seed", r.seed},
                           {"eval_from", r.eval_from}};
        if (r.diverged) row["divergence_time"] = r.divergence_time;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string trace_file(const ExperimentResult& r) { return r.scenario + "__" + r.method + ".csv"; }

}  // namespace

void export_results(const std::vector<ExperimentResult>& results, const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    for (const auto& r : results) {
        const fs::path p = fs::path(dir) / trace_file(r);
        std::ofstream out(p);
        if (!out) throw IoError("cannot write '" + p.string() + "'");
        out.precision(17);
        out << "t,y_d,u,y\n";
        for (std::size_t k = 0; k < r.t.size(); ++k) out << r.t[k] << ',' << r.y_d[k] << ',' << r.u[k] << ',' << r.y[k] << '\n';
        if (!out) throw IoError("failed writing '" + p.string() + "'");
    }
    const fs::path sp = fs::path(dir) / "summary.json";
    std::ofstream s(sp);
    if (!s) throw IoError("cannot write '" + sp.string() + "'");
    s << summary_json(results).dump(2) << '\n';
    if (!s) throw IoError("failed writing '" + sp.string() + "'");
}

std::vector<ExperimentResult> read_results(const std::string& dir)
{
    const fs::path sp = fs::path(dir) / "summary.json";
    std::ifstream s(sp);
    if (!s) throw IoError("cannot read '" + sp.string() + "'");
    const nlohmann::json rows = nlohmann::json::parse(s);
    std::vector<ExperimentResult> out;
    for (const auto& row : rows) {
        ExperimentResult r;
        r.scenario  = row.at("scenario").get<std::string>();
        r.method    = row.at("method").get<std::string>();
        r.rms       = row.at("rms").is_null() ? std::numeric_limits<double>::quiet_NaN() : row.at("rms").get<double>();
        r.diverged  = row.at("diverged").get<bool>();
        r.seed      = row.at("seed").get<std::uint64_t>();
        r.eval_from = row.value("eval_from", 0.0);
        r.divergence_time = row.value("divergence_time", 0.0);
        if (!row.at("reduction_pct").is_null()) r.reduction_pct = row.at("reduction_pct").get<double>();

        const fs::path p = fs::path(dir) / trace_file(r);
        std::ifstream in(p);
        if (!in) throw IoError("cannot read '" + p.string() + "'");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            double v[4];
            char comma;
            ls >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
            if (!ls) throw IoError("malformed row in '" + p.string() + "'");
            r.t.push_back(v[0]);
            r.y_d.push_back(v[1]);
            r.u.push_back(v[2]);
            r.y.push_back(v[3]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace nmpinv::experiment
