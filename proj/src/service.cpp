// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/service.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "promptpower/csv.hpp"
#include "promptpower/error.hpp"
#include "promptpower/json_format.hpp"

namespace promptpower {
namespace {

using nlohmann::json;

constexpr std::string_view kProxyWarning =
    "platform proxies are approximations chosen by configuration, not "
    "disclosed deployments";

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

json error_body(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

HttpResponse error_response(int status, std::string_view code,
                            std::string_view message) {
  return {status, dump_json(error_body(code, message))};
}

// Integer field >= 1, or `fallback` when absent.
std::uint32_t count_field(const json& body, const char* key,
                          std::uint32_t fallback, ErrorCode code) {
  if (!body.contains(key) || body.at(key).is_null()) return fallback;
  const json& v = body.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1 ||
      v.get<long long>() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(code, std::string(key) + " must be an integer >= 1");
  }
  return static_cast<std::uint32_t>(v.get<long long>());
}

std::string string_field(const json& body, const char* key) {
  const json& v = body.at(key);
  if (!v.is_string()) {
    throw Error(ErrorCode::kInvalidValue, std::string(key) + " must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

std::filesystem::path default_data_dir() {
  if (const char* v = std::getenv("PROMPTPOWER_DATA_DIR"); v != nullptr && *v) {
    return v;
  }
  return PROMPTPOWER_DEFAULT_DATA_DIR;
}

ServiceConfig default_service_config(const std::filesystem::path& data_dir) {
  ServiceConfig cfg;
  cfg.catalog_path = data_dir / "gpu_catalog.json";
  cfg.fixtures_dir = data_dir / "fixtures";
  cfg.platforms_path = data_dir / "platforms.json";
  return cfg;
}

ServiceConfig load_service_config(const std::filesystem::path& path,
                                  const ServiceConfig& defaults) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  const std::filesystem::path base = path.parent_path();
  ServiceConfig cfg = defaults;
  try {
    cfg.host = j.value("host", cfg.host);
    cfg.port = j.value("port", cfg.port);
    if (j.contains("model_path")) cfg.model_path = resolve(base, j.at("model_path"));
    if (j.contains("catalog_path")) cfg.catalog_path = resolve(base, j.at("catalog_path"));
    if (j.contains("fixtures_dir")) cfg.fixtures_dir = resolve(base, j.at("fixtures_dir"));
    if (j.contains("platforms_path")) {
      cfg.platforms_path = resolve(base, j.at("platforms_path"));
    }
    cfg.grid_intensity = j.value("grid_intensity", cfg.grid_intensity);
    if (j.contains("insight_factors")) {
      const json& f = j.at("insight_factors");
      cfg.factors.bulb_watts = f.value("bulb_watts", cfg.factors.bulb_watts);
      cfg.factors.tv_watts = f.value("tv_watts", cfg.factors.tv_watts);
      cfg.factors.flight_g_per_km =
          f.value("flight_g_per_km", cfg.factors.flight_g_per_km);
    }
    cfg.chars_per_token = j.value("chars_per_token", cfg.chars_per_token);
    cfg.default_batch = j.value("default_batch", cfg.default_batch);
    cfg.default_gpu = j.value("default_gpu", cfg.default_gpu);
    cfg.memory_utilization = j.value("memory_utilization", cfg.memory_utilization);
    cfg.mape_epsilon = j.value("mape_epsilon", cfg.mape_epsilon);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return cfg;
}

void apply_env_overrides(ServiceConfig& cfg, const EnvLookup& getenv_fn) {
  auto text = [&](const char* name, auto& field) {
    if (const char* v = getenv_fn(name)) field = v;
  };
  auto number = [&](const char* name, double& field) {
    if (const char* v = getenv_fn(name)) field = csv::parse_double(v, name);
  };
  auto integer = [&](const char* name, auto& field, long long lo, long long hi) {
    if (const char* v = getenv_fn(name)) {
      const long long n = csv::parse_integer(v, name);
      if (n < lo || n > hi) {
        throw Error(ErrorCode::kInvalidValue, std::string(name) + " is out of range");
      }
      field = static_cast<std::remove_reference_t<decltype(field)>>(n);
    }
  };
  std::string model, catalog, fixtures, platforms;
  text("PROMPTPOWER_HOST", cfg.host);
  integer("PROMPTPOWER_PORT", cfg.port, 0, 65535);
  text("PROMPTPOWER_MODEL_PATH", model);
  text("PROMPTPOWER_CATALOG_PATH", catalog);
  text("PROMPTPOWER_FIXTURES_DIR", fixtures);
  text("PROMPTPOWER_PLATFORMS_PATH", platforms);
  if (!model.empty()) cfg.model_path = model;
  if (!catalog.empty()) cfg.catalog_path = catalog;
  if (!fixtures.empty()) cfg.fixtures_dir = fixtures;
  if (!platforms.empty()) cfg.platforms_path = platforms;
  number("PROMPTPOWER_GRID_INTENSITY", cfg.grid_intensity);
  number("PROMPTPOWER_BULB_WATTS", cfg.factors.bulb_watts);
  number("PROMPTPOWER_TV_WATTS", cfg.factors.tv_watts);
  number("PROMPTPOWER_FLIGHT_G_PER_KM", cfg.factors.flight_g_per_km);
  number("PROMPTPOWER_CHARS_PER_TOKEN", cfg.chars_per_token);
  number("PROMPTPOWER_MEMORY_UTILIZATION", cfg.memory_utilization);
  number("PROMPTPOWER_MAPE_EPSILON", cfg.mape_epsilon);
  integer("PROMPTPOWER_DEFAULT_BATCH", cfg.default_batch, 1, 1 << 20);
  text("PROMPTPOWER_DEFAULT_GPU", cfg.default_gpu);
  if (const char* v = getenv_fn("PROMPTPOWER_SEED")) {
    cfg.seed = static_cast<std::uint64_t>(csv::parse_integer(v, "PROMPTPOWER_SEED"));
  }
}

void validate(const ServiceConfig& cfg) {
  auto must_exist = [](const std::filesystem::path& p, const char* what) {
    if (p.empty() || !std::filesystem::exists(p)) {
      throw Error(ErrorCode::kIo, std::string(what) + " '" + p.string() +
                                      "' does not exist");
    }
  };
  must_exist(cfg.catalog_path, "catalog_path");
  must_exist(cfg.fixtures_dir, "fixtures_dir");
  must_exist(cfg.platforms_path, "platforms_path");
  must_exist(cfg.model_path, "model_path");
  if (!(cfg.grid_intensity > 0.0) || !std::isfinite(cfg.grid_intensity)) {
    throw Error(ErrorCode::kInvalidValue, "grid_intensity must be > 0");
  }
  if (!(cfg.chars_per_token > 0.0)) {
    throw Error(ErrorCode::kInvalidValue, "chars_per_token must be > 0");
  }
  if (cfg.port < 0 || cfg.port > 65535) {
    throw Error(ErrorCode::kInvalidValue, "port must be in [0, 65535]");
  }
  insights(0.0, 0.0, cfg.factors);
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownPlatform:
    case ErrorCode::kUnknownModelId:
      return 404;
    default:
      return 400;
  }
}

EstimationService::EstimationService(ServiceConfig cfg)
    : cfg_(std::move(cfg)),
      catalog_(GpuCatalog::load(cfg_.catalog_path)),
      archs_(ArchitectureRegistry::load_directory(cfg_.fixtures_dir)),
      platforms_(load_platform_mappings(cfg_.platforms_path)) {
  check_platform_mappings(platforms_, archs_, catalog_);
}

void EstimationService::load_artifact() {
  set_artifact(std::make_shared<const TrainedEstimator>(
      TrainedEstimator::load(cfg_.model_path)));
}

void EstimationService::set_artifact(std::shared_ptr<const TrainedEstimator> model) {
  std::lock_guard lock(mu_);
  model_ = std::move(model);
}

std::shared_ptr<const TrainedEstimator> EstimationService::artifact() const {
  std::lock_guard lock(mu_);
  return model_;
}

json EstimationService::estimate(const json& body) const {
  const std::shared_ptr<const TrainedEstimator> model = artifact();
  if (!model) throw Error(ErrorCode::kIo, "no model artifact is loaded");
  if (!body.is_object()) {
    throw Error(ErrorCode::kParse, "request body must be a JSON object");
  }

  json assumptions = json::object();
  const PlatformMapping* mapping = nullptr;
  std::string model_id;
  if (body.contains("platform")) {
    if (body.contains("model_id")) {
      throw Error(ErrorCode::kInvalidValue, "give either platform or model_id");
    }
    mapping = &map_platform(string_field(body, "platform"), platforms_);
    model_id = mapping->proxy_model_id;
    assumptions["platform"] = mapping->platform;
    assumptions["warning"] = kProxyWarning;
  } else if (body.contains("model_id")) {
    model_id = string_field(body, "model_id");
  } else {
    throw Error(ErrorCode::kMissingField, "platform or model_id is required");
  }
  const ArchitectureDescriptor& arch = archs_.get(model_id);

  const double cpt = mapping != nullptr && mapping->chars_per_token > 0.0
                         ? mapping->chars_per_token
                         : cfg_.chars_per_token;
  auto tokens = [&](const char* count_key, const char* text_key) -> std::uint32_t {
    if (body.contains(count_key)) {
      return count_field(body, count_key, 0, ErrorCode::kInvalidShape);
    }
    if (body.contains(text_key)) {
      const std::uint64_t n = estimate_tokens_from_text(string_field(body, text_key), cpt);
      if (n < 1 || n > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::kInvalidShape,
                    std::string(text_key) + " must contain at least one character");
      }
      assumptions["tokens_from_text"][text_key] = n;
      return static_cast<std::uint32_t>(n);
    }
    throw Error(ErrorCode::kMissingField,
                std::string(count_key) + " or " + text_key + " is required");
  };
  const PromptShape shape{tokens("input_tokens", "input_text"),
                          tokens("output_tokens", "output_text")};
  const std::uint32_t batch =
      count_field(body, "batch_size", cfg_.default_batch, ErrorCode::kInvalidBatch);

  std::string gpu_name = mapping != nullptr ? mapping->gpu_name : cfg_.default_gpu;
  if (body.contains("gpu_name")) gpu_name = string_field(body, "gpu_name");
  const GpuSpec& gpu = catalog_.lookup(gpu_name);
  std::uint32_t gpu_count = 0;
  if (body.contains("gpu_count")) {
    gpu_count = count_field(body, "gpu_count", 0, ErrorCode::kInvalidValue);
  } else if (mapping != nullptr && !body.contains("gpu_name")) {
    gpu_count = mapping->gpu_count;
  } else {
    gpu_count = min_feasible_gpu_count(
        arch, gpu, static_cast<std::uint64_t>(batch) * shape.total_tokens(),
        arch.precision, cfg_.memory_utilization);
  }

  double intensity = cfg_.grid_intensity;
  if (body.contains("grid_intensity")) {
    const json& v = body.at("grid_intensity");
    if (!v.is_number()) {
      throw Error(ErrorCode::kInvalidValue, "grid_intensity must be a number");
    }
    intensity = v.get<double>();
  }

  const HardwareConfig hw = make_hardware(gpu, gpu_count, cfg_.memory_utilization);
  const EnergyEstimate e = estimate_prompt(arch, hw, shape, batch, *model);
  const EmissionsEstimate co2 = co2_from_energy(e.wh_total, intensity);
  const InsightEquivalents ins = insights(e.wh_total, co2.grams_co2e, cfg_.factors);

  assumptions["proxy_model"] = model_id;
  assumptions["hardware"] = {{"gpu_name", gpu.name},
                             {"gpu_count", gpu_count},
                             {"multi_node", hw.multi_node()}};
  assumptions["input_tokens"] = shape.input_tokens;
  assumptions["output_tokens"] = shape.output_tokens;
  assumptions["batch_size"] = batch;
  assumptions["chars_per_token"] = cpt;
  assumptions["estimator_id"] = e.estimator_id;
  assumptions["factors"] = {{"bulb_watts", ins.factors_used.bulb_watts},
                            {"tv_watts", ins.factors_used.tv_watts},
                            {"flight_g_per_km", ins.factors_used.flight_g_per_km},
                            {"grid_intensity", co2.grid_intensity}};
  return {{"wh_per_prompt", e.wh_per_prompt},
          {"wh_total", e.wh_total},
          {"grams_co2e", co2.grams_co2e},
          {"insights",
           {{"lightbulb_minutes", ins.lightbulb_minutes},
            {"tv_minutes", ins.tv_minutes},
            {"flight_km", ins.flight_km}}},
          {"assumptions", assumptions}};
}

HttpResponse EstimationService::handle(std::string_view method,
                                       std::string_view path,
                                       std::string_view body) {
  try {
    if (path == "/v1/health" && method == "GET") {
      const auto model = artifact();
      if (!model) return {503, dump_json({{"status", "loading"}})};
      return {200, dump_json({{"status", "ok"}, {"artifact_id", model->artifact_id()}})};
    }
    if (path == "/v1/models" && method == "GET") {
      return {200, dump_json({{"models", archs_.ids()}})};
    }
    if (path == "/v1/hardware" && method == "GET") {
      return {200, dump_json({{"gpus", catalog_.names()}})};
    }
    if (path == "/v1/platforms" && method == "GET") {
      json list = json::array();
      for (const PlatformMapping& m : platforms_) {
        list.push_back({{"platform", m.platform},
                        {"proxy_model_id", m.proxy_model_id},
                        {"gpu_name", m.gpu_name},
                        {"gpu_count", m.gpu_count}});
      }
      return {200, dump_json({{"platforms", list}})};
    }
    if (path == "/v1/estimate" && method == "POST") {
      if (!artifact()) {
        return error_response(503, "Unavailable", "model artifact is still loading");
      }
      json request;
      try {
        request = json::parse(body);
      } catch (const json::exception& e) {
        return error_response(400, to_string(ErrorCode::kParse), e.what());
      }
      return {200, dump_json(estimate(request))};
    }
    if (path == "/v1/reload" && method == "POST") {
      try {
        load_artifact();
      } catch (const Error& e) {
        return error_response(500, to_string(e.code()), e.detail());
      }
      return {200, dump_json({{"status", "reloaded"},
                              {"artifact_id", artifact()->artifact_id()}})};
    }
    for (std::string_view known : {"/v1/health", "/v1/models", "/v1/hardware",
                                   "/v1/platforms", "/v1/estimate", "/v1/reload"}) {
      if (path == known) {
        return error_response(405, "MethodNotAllowed",
                              std::string(method) + " is not supported here");
      }
    }
    return error_response(404, "NotFound", "no route " + std::string(path));
  } catch (const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.detail());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

}  // namespace promptpower
