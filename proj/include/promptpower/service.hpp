// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptpower/arch.hpp"
#include "promptpower/error.hpp"
#include "promptpower/estimate.hpp"
#include "promptpower/estimator.hpp"
#include "promptpower/hardware.hpp"
#include "promptpower/metrics.hpp"

namespace promptpower {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path model_path;
  std::filesystem::path catalog_path;
  std::filesystem::path fixtures_dir;
  std::filesystem::path platforms_path;
  double grid_intensity = kDefaultGridIntensity;
  InsightFactors factors;
  double chars_per_token = kDefaultCharsPerToken;
  std::uint32_t default_batch = 50;
  std::string default_gpu = "NVIDIA H100 80GB HBM3";
  double memory_utilization = kDefaultMemoryUtilization;
  double mape_epsilon = kDefaultMapeEpsilon;
  std::uint64_t seed = 42;
};

// $PROMPTPOWER_DATA_DIR if set, else the data directory of the source tree.
std::filesystem::path default_data_dir();

// Catalog, fixtures and platforms under `data_dir`; no model artifact.
ServiceConfig default_service_config(const std::filesystem::path& data_dir);

// Keys missing from the file keep their defaults. Relative paths resolve
// against the file's directory.
ServiceConfig load_service_config(const std::filesystem::path& path,
                                  const ServiceConfig& defaults);

using EnvLookup = std::function<const char*(const char*)>;

// Applies PROMPTPOWER_<FIELD> variables (PROMPTPOWER_PORT,
// PROMPTPOWER_MODEL_PATH, PROMPTPOWER_GRID_INTENSITY, ...).
void apply_env_overrides(ServiceConfig& cfg, const EnvLookup& getenv_fn);

// Throws InvalidValue or Io when a path is missing or a number is out of
// range.
void validate(const ServiceConfig& cfg);

struct HttpResponse {
  int status = 200;
  std::string body;
};

// Estimation endpoints over immutable state. The artifact is the only
// mutable piece: it is swapped whole, and each request keeps the pointer
// it started with.
class EstimationService {
 public:
  // Loads catalog, fixtures and platforms; the artifact is loaded
  // separately so /v1/health can report 503 until it is ready.
  explicit EstimationService(ServiceConfig cfg);

  void load_artifact();
  void set_artifact(std::shared_ptr<const TrainedEstimator> model);
  std::shared_ptr<const TrainedEstimator> artifact() const;

  HttpResponse handle(std::string_view method, std::string_view path,
                      std::string_view body);

  // Resolves and answers one POST /v1/estimate body; throws Error.
  nlohmann::json estimate(const nlohmann::json& request) const;

  const ServiceConfig& config() const { return cfg_; }
  const ArchitectureRegistry& archs() const { return archs_; }
  const GpuCatalog& catalog() const { return catalog_; }
  const std::vector<PlatformMapping>& platforms() const { return platforms_; }

 private:
  ServiceConfig cfg_;
  GpuCatalog catalog_;
  ArchitectureRegistry archs_;
  std::vector<PlatformMapping> platforms_;
  mutable std::mutex mu_;
  std::shared_ptr<const TrainedEstimator> model_;
};

// HTTP status for an error code: 404 for unknown platforms and models,
// 400 otherwise.
int http_status(ErrorCode code);

struct ServerHandle {
  int port = 0;                // the bound port, useful when config asks for 0
  std::function<void()> stop;  // safe to call from any thread
};

// Blocks serving `service` until stopped. `on_ready` runs once the socket
// is bound. Port 0 binds an ephemeral port.
void run_http_server(EstimationService& service,
                     const std::function<void(const ServerHandle&)>& on_ready = {});

}  // namespace promptpower
