#include "nmpinv/experiment/artifacts.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nmpinv/errors.hpp"
#include "nmpinv/log.hpp"

namespace nmpinv::experiment {

using nlohmann::json;

namespace {

json history_report(const invlearn::TrainedInverse& t)
{
    const auto& h = t.history;
    return {{"rows", t.rows},
            {"epochs_run", h.epochs_run},
            {"best_epoch", h.best_epoch},
            {"initial_validation_loss", h.initial_validation_loss},
            {"best_validation_loss", h.best_validation_loss},
            {"final_train_loss", h.train_loss.empty() ? json(nullptr) : json(h.train_loss.back())}};
}

bool wants(const RunConfig& cfg, const char* scenario)
{
    return std::find(cfg.run.begin(), cfg.run.end(), scenario) != cfg.run.end();
}

}  // namespace

ArtifactBundle train_artifacts(const RunConfig& cfg, const json& resolved, const SystemSetup& setup)
{
    ArtifactBundle b;
    b.system = to_string(cfg.system);
    b.config = resolved;

    const auto trajectories = training_trajectories(cfg);
    spdlog::info("collecting baseline data on {} trajectories", trajectories.size());
    const auto logs = invlearn::collect_baseline_data(*setup.baseline, trajectories);
    const invlearn::InverseTrainingOptions opts{cfg.build, cfg.training, cfg.network};

    auto train = [&](const invlearn::InputSelection& sel, const char* tag) {
        spdlog::info("training {} ({} features)", tag, sel.feature_count());
        invlearn::TrainedInverse t = invlearn::train_inverse(sel, logs, opts, tag);
        b.report[tag]              = history_report(t);
        spdlog::info("{}: best validation loss {:.4g} at epoch {}", tag, t.history.best_validation_loss, t.history.best_epoch);
        return std::move(t.generator);
    };

    b.approx = train(cfg.selection, method::kApprox);
    if (wants(cfg, "fig4")) {
        invlearn::InputSelection abl = invlearn::InputSelection::augmented_past(cfg.selection.n, cfg.ablation_past);
        abl.encoding                 = cfg.selection.encoding;
        b.ablation                   = train(abl, method::kAblation);
    }
    if (cfg.exact_selection) b.exact = train(*cfg.exact_selection, method::kExact);

    try {
        b.zos = polylti::zos_inverse(setup.design_model);
    } catch (const DegenerateApproximation& e) {
        spdlog::warn("no ZOS inverse for this system: {}", e.what());
    }
    return b;
}

json to_json(const ArtifactBundle& b)
{
    json gens = json::object();
    if (b.approx) gens[method::kApprox] = b.approx->to_json();
    if (b.ablation) gens[method::kAblation] = b.ablation->to_json();
    if (b.exact) gens[method::kExact] = b.exact->to_json();
    return {{"format", "nmpinv-artifacts"},
            {"version", 1},
            {"system", b.system},
            {"config", b.config},
            {"generators", gens},
            {"zos", b.zos ? polylti::to_json(*b.zos) : json(nullptr)},
            {"report", b.report}};
}

ArtifactBundle bundle_from_json(const json& j)
{
    if (j.value("format", "") != "nmpinv-artifacts") throw IoError("not an nmpinv artifact bundle");
    ArtifactBundle b;
    b.system       = j.at("system").get<std::string>();
    b.config       = j.value("config", json::object());
    b.report       = j.value("report", json::object());
    const json& g  = j.at("generators");
    auto load      = [&](const char* tag, std::optional<invlearn::ReferenceGenerator>& into) {
        if (g.contains(tag)) into = invlearn::ReferenceGenerator::from_json(g.at(tag));
    };
    load(method::kApprox, b.approx);
    load(method::kAblation, b.ablation);
    load(method::kExact, b.exact);
    if (j.contains("zos") && !j.at("zos").is_null()) b.zos = polylti::tf_from_json(j.at("zos"));
    return b;
}

std::string serialize(const ArtifactBundle& b) { return to_json(b).dump(1) + "\n"; }

void save_artifacts(const ArtifactBundle& b, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write artifact '" + path + "'");
    out << serialize(b);
    if (!out) throw IoError("failed writing artifact '" + path + "'");
}

ArtifactBundle load_artifacts(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read artifact '" + path + "'");
    try {
        return bundle_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw IoError("malformed artifact '" + path + "': " + e.what());
    }
}

std::string content_hash(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nmpinv::experiment
