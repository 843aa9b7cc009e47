#include "nmpinv/service/service.hpp"

#include <httplib.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "nmpinv/errors.hpp"
#include "nmpinv/log.hpp"

namespace nmpinv::service {

using nlohmann::json;

namespace {

struct RequestError {
    int status;
    std::string message;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read artifact '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json series(const std::vector<double>& t, const std::vector<double>& v) { return {{"t", t}, {"v", v}}; }

Drawing parse_points(const json& pts)
{
    if (!pts.is_array()) throw BadDrawing("points must be an array");
    Drawing d;
    std::size_t width = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const json& p = pts[i];
        std::vector<double> vals;
        double t = 0.0;
        if (p.is_array()) {
            if (p.size() < 2 || p.size() > 4) throw BadDrawing("point " + std::to_string(i) + " must be [t, v] or [t, x, y[, z]]");
            for (const auto& x : p)
                if (!x.is_number()) throw BadDrawing("point " + std::to_string(i) + " has a non-numeric entry");
            t = p[0].get<double>();
            for (std::size_t k = 1; k < p.size(); ++k) vals.push_back(p[k].get<double>());
        } else if (p.is_object() && p.contains("t") && p["t"].is_number()) {
            t = p["t"].get<double>();
            if (p.contains("value")) {
                if (!p["value"].is_number()) throw BadDrawing("point " + std::to_string(i) + " has a non-numeric value");
                vals.push_back(p["value"].get<double>());
            } else {
                for (const char* axis : {"x", "y", "z"}) {
                    if (!p.contains(axis)) break;
                    if (!p[axis].is_number()) throw BadDrawing("point " + std::to_string(i) + " has a non-numeric " + axis);
                    vals.push_back(p[axis].get<double>());
                }
            }
            if (vals.empty()) throw BadDrawing("point " + std::to_string(i) + " has no value");
        } else {
            throw BadDrawing("point " + std::to_string(i) + " is malformed");
        }
        if (i == 0) {
            width = vals.size();
            d.axes.assign(width, {});
        } else if (vals.size() != width) {
            throw BadDrawing("every point needs the same number of axes");
        }
        d.t.push_back(t);
        for (std::size_t k = 0; k < width; ++k) d.axes[k].push_back(vals[k]);
    }
    return d;
}

std::string canonical_method(const std::string& m)
{
    if (m == "baseline") return experiment::method::kBaseline;
    if (m == "M2_zos" || m == "M2") return experiment::method::kZos;
    if (m == "M3_dnn" || m == "M3_approx_dnn" || m == "M3") return experiment::method::kApprox;
    if (m == "M1_exact_dnn" || m == "M1_dnn" || m == "M1")
        throw RequestError{422, "method M1 is available in batch experiments only: the exact inverse is unstable for this system"};
    throw RequestError{422, "unknown method '" + m + "' (expected baseline, M2_zos or M3_dnn)"};
}

json error_body(const std::string& message) { return {{"error", message}}; }

}  // namespace

std::shared_ptr<const LoadedSystem> make_system(experiment::ArtifactBundle bundle, std::string source, std::string hash)
{
    auto s       = std::make_shared<LoadedSystem>();
    s->config    = experiment::parse_config(bundle.config);
    s->setup     = experiment::build_system(s->config);
    s->name      = experiment::to_string(s->config.system);
    s->artifacts = std::move(bundle);
    s->source    = std::move(source);
    s->hash      = hash.empty() ? experiment::content_hash(experiment::serialize(s->artifacts)) : std::move(hash);
    return s;
}

TrackingService::TrackingService(experiment::ServiceSpec spec)
    : spec_(std::move(spec)), systems_(std::make_shared<Table>()), server_(std::make_unique<httplib::Server>())
{
    server_->set_default_headers({{"Access-Control-Allow-Origin", spec_.cors_origin},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                  {"Access-Control-Allow-Headers", "Content-Type"}});
    auto send = [](httplib::Response& res, const Reply& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server_->Post("/api/track", [this, send](const httplib::Request& req, httplib::Response& res) { send(res, track(req.body)); });
    server_->Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
    server_->Get("/api/artifacts", [this, send](const httplib::Request&, httplib::Response& res) { send(res, artifacts()); });
    server_->Post("/api/artifacts/reload", [this, send](const httplib::Request&, httplib::Response& res) { send(res, reload()); });
    server_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty()) {
            const std::string msg = res.status == 404 ? "no route for " + req.method + " " + req.path : "request failed";
            res.set_content(error_body(msg).dump(), "application/json");
        }
    });
}

TrackingService::~TrackingService() = default;

std::shared_ptr<const TrackingService::Table> TrackingService::snapshot() const
{
    std::lock_guard<std::mutex> lock(mu_);
    return systems_;
}

void TrackingService::add(std::shared_ptr<const LoadedSystem> system)
{
    std::lock_guard<std::mutex> lock(mu_);
    auto next             = std::make_shared<Table>(*systems_);
    (*next)[system->name] = std::move(system);
    systems_              = std::move(next);
}

void TrackingService::load_file(const std::string& path)
{
    const std::string bytes = read_file(path);
    experiment::ArtifactBundle bundle;
    try {
        bundle = experiment::bundle_from_json(json::parse(bytes));
    } catch (const json::exception& e) {
        throw IoError("malformed artifact '" + path + "': " + e.what());
    }
    auto sys = make_system(std::move(bundle), path, experiment::content_hash(bytes));
    spdlog::info("loaded {} artifacts from {} (hash {})", sys->name, path, sys->hash);
    add(std::move(sys));
}

Reply TrackingService::reload()
{
    const auto table = snapshot();
    json loaded      = json::object();
    try {
        for (const auto& [name, sys] : *table) {
            if (sys->source.empty()) continue;
            load_file(sys->source);
        }
    } catch (const std::exception& e) {
        spdlog::error("reload failed: {}", e.what());
        return {500, error_body(std::string("reload failed: ") + e.what())};
    }
    for (const auto& [name, sys] : *snapshot()) loaded[name] = sys->hash;
    return {200, {{"status", "ok"}, {"artifacts", loaded}}};
}

Reply TrackingService::health() const
{
    json hashes = json::object();
    for (const auto& [name, sys] : *snapshot()) hashes[name] = sys->hash;
    return {200, {{"status", "ok"}, {"build", {{"name", "nmpinv"}, {"version", kVersion}}}, {"artifacts", hashes}}};
}

Reply TrackingService::artifacts() const
{
    json systems = json::array();
    for (const auto& [name, sys] : *snapshot()) {
        json methods = json::array({experiment::method::kBaseline});
        if (sys->artifacts.zos) methods.push_back("M2_zos");
        if (sys->artifacts.approx) methods.push_back("M3_dnn");
        json gens = json::array();
        for (const auto* g : {&sys->artifacts.approx, &sys->artifacts.ablation, &sys->artifacts.exact})
            if (*g) gens.push_back({{"name", (*g)->name()}, {"selection", invlearn::to_json((*g)->selection())}});
        systems.push_back({{"system", name},
                           {"preset", sys->config.preset},
                           {"sample_time", sys->setup.dt},
                           {"hash", sys->hash},
                           {"methods", methods},
                           {"generators", gens}});
    }
    return {200, {{"systems", systems}}};
}

Reply TrackingService::track(const std::string& body) const
{
    try {
        json req;
        try {
            req = json::parse(body);
        } catch (const json::exception& e) {
            throw RequestError{400, std::string("request is not valid JSON: ") + e.what()};
        }
        if (!req.is_object()) throw RequestError{400, "request must be a JSON object"};
        if (!req.contains("system") || !req["system"].is_string()) throw RequestError{422, "missing system"};
        if (!req.contains("method") || !req["method"].is_string()) throw RequestError{422, "missing method"};
        const std::string system_name = req["system"].get<std::string>();
        const std::string method      = canonical_method(req["method"].get<std::string>());

        const auto table = snapshot();
        const auto it    = table->find(system_name);
        if (it == table->end()) throw RequestError{422, "unknown or unloaded system '" + system_name + "'"};
        const LoadedSystem& sys = *it->second;

        const plantsim::ReferenceSource* source = nullptr;
        std::optional<plantsim::TransferFunctionReference> zos;
        if (method == experiment::method::kZos) {
            if (!sys.artifacts.zos) throw RequestError{422, "no ZOS inverse is available for " + system_name};
            zos.emplace(*sys.artifacts.zos, method);
            source = &*zos;
        } else if (method == experiment::method::kApprox) {
            if (!sys.artifacts.approx) throw RequestError{422, "no learned generator is loaded for " + system_name};
            source = &*sys.artifacts.approx;
        }

        PreprocessOptions opts;
        opts.sample_time      = sys.setup.dt;
        opts.smoothing_window = spec_.smoothing_window;
        opts.workspace        = spec_.workspace;
        opts.max_duration     = spec_.max_duration;
        if (req.contains("preprocessing")) {
            const json& p = req["preprocessing"];
            if (!p.is_object()) throw RequestError{400, "preprocessing must be an object"};
            if (p.contains("smoothing_window")) {
                if (!p["smoothing_window"].is_number_integer()) throw RequestError{400, "smoothing_window must be an integer"};
                opts.smoothing_window = p["smoothing_window"].get<int>();
            }
            if (p.contains("workspace")) {
                if (!p["workspace"].is_number()) throw RequestError{400, "workspace must be a number"};
                opts.workspace = std::min(p["workspace"].get<double>(), spec_.workspace);
            }
        }
        if (!req.contains("points")) throw BadDrawing("missing points");
        const Drawing drawing = parse_points(req["points"]);
        const std::size_t max_axes = sys.config.system == experiment::SystemKind::Pendulum ? 1 : 3;
        if (drawing.axes.size() > max_axes)
            throw BadDrawing(system_name + " tracks at most " + std::to_string(max_axes) + " axis");
        const PreparedDrawing prepared = preprocess_drawing(drawing, opts);

        const plantsim::DesiredReference identity;
        const double duration  = prepared.axes.front().time(prepared.axes.front().size() - 1);
        const double eval_from = duration > 2.0 * sys.config.eval_skip ? sys.config.eval_skip : 0.0;
        const char* axis_names[] = {"x", "y", "z"};

        json desired = json::array(), output = json::array(), reference = json::array();
        std::vector<double> t;
        double se_method = 0.0, se_base = 0.0;
        std::size_t n_method = 0, n_base = 0;
        bool diverged = false, base_diverged = false;
        double divergence_time = 0.0;
        for (std::size_t a = 0; a < prepared.axes.size(); ++a) {
            const plantsim::Trajectory& d = prepared.axes[a];
            const plantsim::Trace base    = plantsim::simulate_closed_loop(*sys.setup.baseline, identity, d);
            const plantsim::Trace run =
                source ? plantsim::simulate_closed_loop(*sys.setup.baseline, *source, d) : base;
            auto accumulate = [&](const plantsim::Trace& tr, double& se, std::size_t& n) {
                se = 0.0;
                n  = 0;
                for (std::size_t k = 0; k < tr.size(); ++k)
                    if (tr.t[k] >= eval_from - 1e-9) {
                        se += (tr.y[k] - d.pos[k]) * (tr.y[k] - d.pos[k]);
                        ++n;
                    }
            };
            double se = 0.0;
            std::size_t n = 0;
            accumulate(run, se, n);
            se_method += se;
            n_method = n;
            accumulate(base, se, n);
            se_base += se;
            n_base = n;
            if (run.diverged && !diverged) {
                diverged        = true;
                divergence_time = run.divergence_time;
            }
            base_diverged = base_diverged || base.diverged;
            if (a == 0) {
                t.resize(d.size());
                for (std::size_t k = 0; k < d.size(); ++k) t[k] = d.time(k);
            }
            const std::vector<double> rt(run.t.begin(), run.t.end());
            desired.push_back(series(t, d.pos));
            desired.back()["axis"] = axis_names[a];
            output.push_back(series(rt, run.y));
            output.back()["axis"] = axis_names[a];
            reference.push_back(series(rt, run.ref_pos));
            reference.back()["axis"] = axis_names[a];
        }
        const double rms      = (diverged || n_method == 0) ? NAN : std::sqrt(se_method / static_cast<double>(n_method));
        const double base_rms = (base_diverged || n_base == 0) ? NAN : std::sqrt(se_base / static_cast<double>(n_base));
        json reduction        = nullptr;
        if (std::isfinite(rms) && std::isfinite(base_rms) && base_rms > 0.0)
            reduction = experiment::reduction_pct(rms, base_rms);

        json resp{{"system", system_name},
                  {"method", method == experiment::method::kApprox ? "M3_dnn" : method},
                  {"sample_time", sys.setup.dt},
                  {"eval_from", eval_from},
                  {"desired", desired},
                  {"output", output},
                  {"reference", reference},
                  {"rms", std::isfinite(rms) ? json(rms) : json(nullptr)},
                  {"baseline_rms", std::isfinite(base_rms) ? json(base_rms) : json(nullptr)},
                  {"reduction_pct", reduction},
                  {"diverged", diverged},
                  {"divergence_time", diverged ? json(divergence_time) : json(nullptr)},
                  {"preprocessing", prepared.metadata},
                  {"artifact_hash", sys.hash}};
        return {200, std::move(resp)};
    } catch (const RequestError& e) {
        return {e.status, error_body(e.message)};
    } catch (const BadDrawing& e) {
        return {400, error_body(std::string("bad drawing: ") + e.what())};
    } catch (const std::exception& e) {
        const std::string id = experiment::content_hash(body);
        spdlog::error("track request {} failed: {}", id, e.what());
        return {500, {{"error", "internal error"}, {"diagnostic_id", id}}};
    }
}

bool TrackingService::bind(const std::string& host, int port)
{
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
        return port_ > 0;
    }
    if (!server_->bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

void TrackingService::listen() { server_->listen_after_bind(); }

void TrackingService::stop() { server_->stop(); }

}  // namespace nmpinv::service
