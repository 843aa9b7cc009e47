#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "nmpinv/experiment/artifacts.hpp"
#include "nmpinv/experiment/config.hpp"
#include "nmpinv/experiment/setup.hpp"
#include "nmpinv/service/drawing.hpp"

namespace httplib {
class Server;
}

namespace nmpinv::service {

inline constexpr const char* kVersion = "0.1.0";

struct Reply {
    int status = 200;
    nlohmann::json body;
};

// One servable system: its config, simulation setup and trained artifacts. Immutable once built.
struct LoadedSystem {
    std::string name;
    experiment::RunConfig config;
    experiment::SystemSetup setup;
    experiment::ArtifactBundle artifacts;
    std::string source;  // artifact file, empty for in-memory bundles
    std::string hash;
};

std::shared_ptr<const LoadedSystem> make_system(experiment::ArtifactBundle bundle, std::string source, std::string hash);

// Request handling over immutable loaded systems. Every request simulates on its own state,
// so handlers may run concurrently; reload swaps the system table atomically.
class TrackingService {
public:
    explicit TrackingService(experiment::ServiceSpec spec);
    ~TrackingService();
    TrackingService(const TrackingService&)            = delete;
    TrackingService& operator=(const TrackingService&) = delete;

    void load_file(const std::string& artifact_path);
    void add(std::shared_ptr<const LoadedSystem> system);

    Reply track(const std::string& body) const;
    Reply health() const;
    Reply artifacts() const;
    Reply reload();  // re-reads every file-backed system

    // HTTP plumbing. bind() returns false if the port is unavailable; port 0 picks a free one.
    bool bind(const std::string& host, int port);
    int bound_port() const { return port_; }
    void listen();  // blocks until stop()
    void stop();

private:
    using Table = std::map<std::string, std::shared_ptr<const LoadedSystem>>;
    std::shared_ptr<const Table> snapshot() const;

    experiment::ServiceSpec spec_;
    mutable std::mutex mu_;
    std::shared_ptr<const Table> systems_;
    std::unique_ptr<httplib::Server> server_;
    int port_ = 0;
};

}  // namespace nmpinv::service
