#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

#include "nmpinv/experiment/config.hpp"
#include "nmpinv/experiment/result.hpp"
#include "nmpinv/experiment/setup.hpp"
#include "nmpinv/invlearn/generator.hpp"
#include "nmpinv/polylti/transfer_function.hpp"

namespace nmpinv::experiment {

// Everything evaluation needs besides the config: the learned generators and the ZOS inverse.
struct ArtifactBundle {
    std::string system;
    nlohmann::json config = nlohmann::json::object();  // resolved config the bundle was trained from
    std::optional<invlearn::ReferenceGenerator> approx;    // M3
    std::optional<invlearn::ReferenceGenerator> ablation;  // past-reference selection of the instability ablation
    std::optional<invlearn::ReferenceGenerator> exact;     // M1
    std::optional<polylti::DiscreteTransferFunction> zos;  // M2
    nlohmann::json report = nlohmann::json::object();      // training summary per generator
};

// Collects baseline data and trains every generator the config asks for.
// Throws BaselineDiverged, LogTooShort or NonFiniteLoss.
ArtifactBundle train_artifacts(const RunConfig& cfg, const nlohmann::json& resolved, const SystemSetup& setup);

nlohmann::json to_json(const ArtifactBundle& bundle);
ArtifactBundle bundle_from_json(const nlohmann::json& j);

// Deterministic serialization: identical bundles give identical bytes.
std::string serialize(const ArtifactBundle& bundle);
void save_artifacts(const ArtifactBundle& bundle, const std::string& path);  // IoError
ArtifactBundle load_artifacts(const std::string& path);                      // IoError

// 64-bit FNV-1a as 16 hex digits.
std::string content_hash(std::string_view bytes);

}  // namespace nmpinv::experiment
