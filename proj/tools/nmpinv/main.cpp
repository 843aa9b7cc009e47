#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "nmpinv/errors.hpp"
#include "nmpinv/experiment/artifacts.hpp"
#include "nmpinv/experiment/config.hpp"
#include "nmpinv/experiment/result.hpp"
#include "nmpinv/experiment/scenarios.hpp"
#include "nmpinv/experiment/setup.hpp"
#include "nmpinv/log.hpp"
#include "nmpinv/polylti/transfer_function.hpp"
#include "nmpinv/service/service.hpp"

namespace {

using namespace nmpinv;
using nlohmann::json;

enum Exit { kOk = 0, kConfig = 2, kTraining = 3, kScenario = 4, kDegenerate = 5, kPort = 6 };

struct Options {
    std::string config;
    std::vector<std::string> artifacts;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> port;
};

struct Loaded {
    json resolved;
    experiment::RunConfig cfg;
};

Loaded load(const Options& o)
{
    json doc = experiment::load_config_document(o.config);
    if (o.seed) doc["seed"] = *o.seed;
    Loaded l{doc, experiment::parse_config(doc)};
    return l;
}

std::string artifact_path(const Options& o, const experiment::RunConfig& cfg)
{
    if (!o.artifacts.empty()) return o.artifacts.front();
    return (std::filesystem::path(cfg.output_dir) / "artifacts.json").string();
}

void write_text(const std::string& path, const std::string& text)
{
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write '" + path + "'");
}

int cmd_train(const Options& o)
{
    Loaded l;
    experiment::SystemSetup setup;
    try {
        l     = load(o);
        setup = experiment::build_system(l.cfg);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kConfig;
    }
    experiment::ArtifactBundle bundle;
    try {
        bundle = experiment::train_artifacts(l.cfg, l.resolved, setup);
    } catch (const std::exception& e) {
        spdlog::error("training failed: {}", e.what());
        return kTraining;
    }
    const std::string path = artifact_path(o, l.cfg);
    try {
        write_text(path, experiment::serialize(bundle));
        const std::string report = std::filesystem::path(path).replace_extension(".report.json").string();
        write_text(report, json{{"system", bundle.system}, {"seed", l.cfg.seed}, {"generators", bundle.report}}.dump(2) + "\n");
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kTraining;
    }
    spdlog::info("wrote {}", path);
    return kOk;
}

int cmd_eval(const Options& o)
{
    Loaded l;
    experiment::SystemSetup setup;
    experiment::ArtifactBundle bundle;
    try {
        l     = load(o);
        setup = experiment::build_system(l.cfg);
        if (!l.cfg.run.empty()) bundle = experiment::load_artifacts(artifact_path(o, l.cfg));
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kConfig;
    }
    const std::string out = o.out.empty() ? l.cfg.output_dir : o.out;
    try {
        const experiment::ScenarioContext ctx{l.cfg, setup, bundle};
        const auto results = experiment::run_scenarios(ctx, l.cfg.run);
        experiment::export_results(results, out);
        for (const auto& r : results)
            spdlog::info("{:<16} {:<16} rms {:>10.4g}  reduction {:>7}  {}", r.scenario, r.method, r.rms,
                         r.reduction_pct ? fmt::format("{:.1f}%", *r.reduction_pct) : "-",
                         r.diverged ? fmt::format("diverged at {:.2f} s", r.divergence_time) : "");
    } catch (const std::exception& e) {
        spdlog::error("scenario failed: {}", e.what());
        return kScenario;
    }
    spdlog::info("wrote results to {}", out);
    return kOk;
}

json complex_list(const std::vector<polylti::Complex>& zs)
{
    json a = json::array();
    for (const auto& z : zs) a.push_back({z.real(), z.imag()});
    return a;
}

int cmd_zos(const Options& o)
{
    polylti::DiscreteTransferFunction tf({1.0}, {1.0}, 1.0);
    try {
        std::ifstream in(o.config);
        if (!in) throw ConfigError("cannot open transfer function file '" + o.config + "'");
        tf = polylti::tf_from_json(json::parse(in));
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kConfig;
    }
    try {
        const auto zc = polylti::classify_zeros(tf);
        const json doc{{"input", polylti::to_json(tf)},
                       {"minimum_phase", zc.unstable_zeros.empty()},
                       {"zeros", {{"stable", complex_list(zc.stable_zeros)},
                                  {"unstable", complex_list(zc.unstable_zeros)},
                                  {"gain", zc.gain}}},
                       {"zos", polylti::to_json(polylti::zos_inverse(tf))},
                       {"naive", polylti::to_json(polylti::naive_approx_inverse(tf))}};
        std::cout << doc.dump(2) << '\n';
        if (!o.out.empty()) write_text(o.out, doc.dump(2) + "\n");
    } catch (const DegenerateApproximation& e) {
        spdlog::error("{}", e.what());
        return kDegenerate;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kConfig;
    }
    return kOk;
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

int cmd_serve(const Options& o)
{
    experiment::RunConfig cfg;
    std::unique_ptr<service::TrackingService> svc;
    try {
        cfg = load(o).cfg;
        svc = std::make_unique<service::TrackingService>(cfg.service);
        if (o.artifacts.empty()) svc->load_file(artifact_path(o, cfg));
        for (const auto& a : o.artifacts) svc->load_file(a);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kConfig;
    }
    const int port = o.port.value_or(cfg.service.port);
    if (!svc->bind(cfg.service.host, port)) {
        spdlog::error("cannot bind {}:{}", cfg.service.host, port);
        return kPort;
    }
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::atomic<bool> done{false};
    std::thread watcher([&] {
        while (!done.load() && !g_interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(20));
        svc->stop();
    });
    spdlog::info("listening on http://{}:{}", cfg.service.host, svc->bound_port());
    std::cerr.flush();
    svc->listen();
    done.store(true);
    watcher.join();
    spdlog::info("stopped");
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    nmpinv::init_logging();
    CLI::App app{"Learn stable approximate inverses of non-minimum phase systems and evaluate them"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", o.config, "config JSON (may extend a preset)");
        if (config_required) c->required();
        sub->add_option("--seed", o.seed, "run seed (overrides the config)");
    };
    auto* train = app.add_subcommand("train", "collect baseline data and train the generators");
    common(train, true);
    train->add_option("--artifact", o.artifacts, "artifact file to write (default <output_dir>/artifacts.json)")->expected(1);
    train->add_option("--out", o.out, "unused; accepted for symmetry");

    auto* eval = app.add_subcommand("eval", "run the configured scenarios and export results");
    common(eval, true);
    eval->add_option("--artifact", o.artifacts, "artifact file to evaluate")->expected(1);
    eval->add_option("--out", o.out, "output directory (default from config)");

    auto* zos = app.add_subcommand("zos", "print the ZOS and naive approximate inverses of a transfer function");
    zos->add_option("--config", o.config, "transfer function JSON {num, den, dt}")->required();
    zos->add_option("--out", o.out, "also write the result to this file");

    auto* serve = app.add_subcommand("serve", "start the HTTP tracking service");
    common(serve, true);
    serve->add_option("--artifact", o.artifacts, "artifact files to serve (repeatable)");
    serve->add_option("--port", o.port, "port (default from config)");

    CLI11_PARSE(app, argc, argv);
    if (train->parsed()) return cmd_train(o);
    if (eval->parsed()) return cmd_eval(o);
    if (zos->parsed()) return cmd_zos(o);
    return cmd_serve(o);
}
