// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: one subcommand per library workflow.
//
// Exit status: 0 on success, 1 when the library rejects the input, 2 for
// usage errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "promptpower/arch.hpp"
#include "promptpower/csv.hpp"
#include "promptpower/cv.hpp"
#include "promptpower/dataset.hpp"
#include "promptpower/error.hpp"
#include "promptpower/estimate.hpp"
#include "promptpower/estimator.hpp"
#include "promptpower/features.hpp"
#include "promptpower/hardware.hpp"
#include "promptpower/importance.hpp"
#include "promptpower/json_format.hpp"
#include "promptpower/report.hpp"
#include "promptpower/service.hpp"

namespace pp = promptpower;
using nlohmann::json;

namespace {

struct Resources {
  pp::ArchitectureRegistry archs;
  pp::GpuCatalog catalog;
};

Resources load_resources(const std::filesystem::path& data_dir) {
  return {pp::ArchitectureRegistry::load_directory(data_dir / "fixtures"),
          pp::GpuCatalog::load(data_dir / "gpu_catalog.json")};
}

pp::MeasurementSet load_measurements(const std::string& path) {
  pp::IngestResult r = pp::ingest_csv(path);
  for (const pp::RejectedRow& row : r.rejected) {
    std::cerr << "warning: " << path << ":" << row.line << ": " << row.reason
              << "\n";
  }
  return std::move(r.set);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pp::Error(pp::ErrorCode::kIo, "cannot write " + path);
  out << text;
}

std::vector<pp::PromptShape> parse_prompt_list(const std::string& spec) {
  std::vector<pp::PromptShape> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw pp::Error(pp::ErrorCode::kParse,
                      "prompt '" + item + "' is not input:output");
    }
    const long long in = pp::csv::parse_integer(item.substr(0, colon), "input tokens");
    const long long out_tokens =
        pp::csv::parse_integer(item.substr(colon + 1), "output tokens");
    if (in < 1 || out_tokens < 1) {
      throw pp::Error(pp::ErrorCode::kInvalidShape, "token counts must be >= 1");
    }
    out.push_back({static_cast<std::uint32_t>(in),
                   static_cast<std::uint32_t>(out_tokens)});
  }
  return out;
}

std::vector<pp::PromptShape> read_prompt_file(const std::string& path) {
  const auto rows = pp::csv::lines(pp::csv::read_file(path));
  if (rows.empty() || rows.front() != "input_tokens,output_tokens") {
    throw pp::Error(pp::ErrorCode::kSchemaMismatch,
                    path + ": expected header 'input_tokens,output_tokens'");
  }
  std::string spec;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    const auto f = pp::csv::split_line(rows[i]);
    if (f.size() != 2) {
      throw pp::Error(pp::ErrorCode::kParse, path + ": expected 2 fields");
    }
    if (!spec.empty()) spec += ',';
    spec += f[0] + ":" + f[1];
  }
  return parse_prompt_list(spec);
}

pp::HardwareConfig resolve_hardware(const Resources& res,
                                    const pp::ArchitectureDescriptor& arch,
                                    const std::string& gpu_name,
                                    std::uint32_t gpu_count,
                                    std::uint64_t kv_tokens) {
  const pp::GpuSpec& gpu = res.catalog.lookup(gpu_name);
  if (gpu_count == 0) {
    gpu_count = pp::min_feasible_gpu_count(arch, gpu, kv_tokens, arch.precision);
  }
  return pp::make_hardware(gpu, gpu_count);
}

struct CvOptions {
  std::uint64_t seed = 42;
  std::size_t folds = 5;
  std::size_t repeats = 5;
  std::string transform = "log";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "base seed for folds and trees")
        ->capture_default_str();
    cmd->add_option("--folds", folds, "cross-validation folds")
        ->capture_default_str();
    cmd->add_option("--repeats", repeats, "cross-validation repeats")
        ->capture_default_str();
    cmd->add_option("--transform", transform, "target transform: log or identity")
        ->capture_default_str();
  }
  pp::CvConfig config() const {
    pp::CvConfig cfg;
    cfg.seed = seed;
    cfg.folds = folds;
    cfg.repeats = repeats;
    cfg.transform = pp::parse_transform(transform);
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-prompt LLM inference energy estimation"};
  app.require_subcommand(1);
  std::string data_dir = pp::default_data_dir().string();
  app.add_option("--data-dir", data_dir,
                 "directory holding fixtures/, gpu_catalog.json, platforms.json")
      ->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate a measurement CSV");
  std::string ingest_data, ingest_out;
  ingest->add_option("--data", ingest_data, "measurement CSV")->required();
  ingest->add_option("--out", ingest_out, "write the normalized CSV here");

  // features
  auto* features = app.add_subcommand("features", "export the feature matrix");
  std::string features_data, features_out;
  bool keep_small = false;
  features->add_option("--data", features_data, "measurement CSV")->required();
  features->add_option("--out", features_out, "output CSV (default stdout)");
  features->add_flag("--keep-small-batches", keep_small,
                     "skip the batch_size > 5 training filter");

  // train
  auto* train = app.add_subcommand("train", "grid-search by CV and fit a model");
  std::string train_family = "random_forest", train_data, train_out;
  CvOptions train_cv;
  train->add_option("--family", train_family, "model family")->capture_default_str();
  train->add_option("--data", train_data, "measurement CSV")->required();
  train->add_option("--out", train_out, "artifact path")->required();
  train_cv.add_to(train);

  // eval
  auto* eval = app.add_subcommand("eval", "repeated cross-validation metrics");
  std::string eval_family = "all", eval_data;
  CvOptions eval_cv;
  eval->add_option("--family", eval_family, "model family or 'all'")
      ->capture_default_str();
  eval->add_option("--data", eval_data, "measurement CSV")->required();
  eval_cv.add_to(eval);

  // holdout
  auto* holdout = app.add_subcommand("holdout", "train without one model, test on it");
  std::string holdout_model, holdout_family = "random_forest", holdout_data,
                             importance_out;
  CvOptions holdout_cv;
  holdout->add_option("--model-id", holdout_model, "model held out")->required();
  holdout->add_option("--family", holdout_family, "model family")
      ->capture_default_str();
  holdout->add_option("--data", holdout_data, "measurement CSV")->required();
  holdout->add_option("--importance-out", importance_out,
                      "write permutation importances of the trained model here");
  holdout_cv.add_to(holdout);

  // predict
  auto* predict = app.add_subcommand("predict", "energy of one prompt shape");
  std::string predict_model, predict_gpu = "NVIDIA H100 80GB HBM3", predict_artifact,
                             predict_precision;
  std::uint32_t predict_count = 0, predict_in = 0, predict_out = 0, predict_batch = 1;
  predict->add_option("--model-id", predict_model, "fixture model id")->required();
  predict->add_option("--gpu", predict_gpu, "catalog GPU name")->capture_default_str();
  predict->add_option("--gpu-count", predict_count,
                      "GPUs (default: fewest that hold the batch)");
  predict->add_option("--input-tokens", predict_in, "input tokens")->required();
  predict->add_option("--output-tokens", predict_out, "output tokens")->required();
  predict->add_option("--batch-size", predict_batch, "prompts per batch")
      ->capture_default_str();
  predict->add_option("--precision", predict_precision, "override weight precision");
  predict->add_option("--artifact", predict_artifact, "trained model")->required();

  // mixed
  auto* mixed = app.add_subcommand("mixed", "energy of a batch of differing prompts");
  std::string mixed_model, mixed_gpu = "NVIDIA H100 80GB HBM3", mixed_artifact,
                           mixed_prompts, mixed_file;
  std::uint32_t mixed_count = 0;
  mixed->add_option("--model-id", mixed_model, "fixture model id")->required();
  mixed->add_option("--gpu", mixed_gpu, "catalog GPU name")->capture_default_str();
  mixed->add_option("--gpu-count", mixed_count,
                    "GPUs (default: fewest that hold the batch)");
  auto* prompts_opt =
      mixed->add_option("--prompts", mixed_prompts, "comma list of input:output");
  auto* file_opt = mixed->add_option(
      "--prompts-file", mixed_file, "CSV with header input_tokens,output_tokens");
  prompts_opt->excludes(file_opt);
  mixed->add_option("--artifact", mixed_artifact, "trained model")->required();

  // report
  auto* report = app.add_subcommand("report", "energy vs. benchmark score frontier");
  std::string report_scores, report_artifact, report_md, report_csv;
  pp::ReferenceWorkload workload;
  report->add_option("--scores", report_scores, "CSV model_id,benchmark,score")
      ->required();
  report->add_option("--artifact", report_artifact, "trained model")->required();
  report->add_option("--markdown-out", report_md, "Markdown output (default stdout)");
  report->add_option("--csv-out", report_csv, "CSV output");
  report->add_option("--gpu", workload.gpu_name, "reference GPU")->capture_default_str();
  report->add_option("--batch-size", workload.batch_size, "reference batch size")
      ->capture_default_str();
  report->add_option("--input-tokens", workload.shape.input_tokens,
                     "reference input tokens")
      ->capture_default_str();
  report->add_option("--output-tokens", workload.shape.output_tokens,
                     "reference output tokens")
      ->capture_default_str();

  // insights
  auto* insight = app.add_subcommand("insights", "CO2 and everyday equivalents");
  double insight_wh = 0.0, insight_intensity = pp::kDefaultGridIntensity;
  pp::InsightFactors factors;
  insight->add_option("--wh", insight_wh, "energy in Wh")->required();
  insight->add_option("--intensity", insight_intensity, "grid gCO2e/kWh")
      ->capture_default_str();
  insight->add_option("--bulb-watts", factors.bulb_watts)->capture_default_str();
  insight->add_option("--tv-watts", factors.tv_watts)->capture_default_str();
  insight->add_option("--flight-g-per-km", factors.flight_g_per_km)
      ->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP estimation service");
  std::string serve_config, serve_host, serve_artifact;
  std::optional<int> serve_port;
  serve->add_option("--config", serve_config, "service config JSON");
  serve->add_option("--host", serve_host, "listen address");
  serve->add_option("--port", serve_port, "listen port");
  serve->add_option("--artifact", serve_artifact, "trained model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const std::filesystem::path dir(data_dir);

    if (*ingest) {
      const pp::IngestResult r = pp::ingest_csv(ingest_data);
      for (const pp::RejectedRow& row : r.rejected) {
        std::cerr << "rejected line " << row.line << ": " << row.reason << "\n";
      }
      std::map<std::string, std::size_t> by_source;
      for (const auto& rec : r.set.records) ++by_source[std::string(pp::to_string(rec.source))];
      const pp::Summary s = pp::summarize(r.set, [](const auto&) { return true; });
      std::cout << "records," << r.set.records.size() << "\n"
                << "rejected," << r.rejected.size() << "\n";
      for (const auto& [source, n] : by_source) {
        std::cout << "source:" << source << "," << n << "\n";
      }
      std::cout << "median_wh," << pp::csv::format_double(s.median) << "\n"
                << "q25_wh," << pp::csv::format_double(s.q25) << "\n"
                << "q75_wh," << pp::csv::format_double(s.q75) << "\n"
                << "max_wh," << pp::csv::format_double(s.max) << "\n";
      if (!ingest_out.empty()) write_text(ingest_out, pp::export_csv(r.set));
      return 0;
    }

    const Resources res = load_resources(dir);
    const pp::FeatureContext ctx{&res.archs, &res.catalog};

    if (*features) {
      pp::MeasurementSet set = load_measurements(features_data);
      if (!keep_small) {
        const pp::FilterResult f = pp::training_filter(set);
        std::cerr << "dropped " << f.dropped << " records with batch_size <= 5\n";
        set = f.set;
      }
      std::ostringstream out;
      pp::export_feature_matrix(pp::build_training_data(set, ctx), out);
      write_text(features_out, out.str());
      return 0;
    }

    if (*train) {
      const pp::MeasurementSet set = load_measurements(train_data);
      const pp::TrainingData data =
          pp::build_training_data(pp::training_filter(set).set, ctx);
      const pp::Family family = pp::parse_family(train_family);
      const pp::TrainResult r = pp::train_with_cv(data, family, train_cv.config());
      r.model.save(train_out);
      std::cerr << "family " << pp::to_string(family) << ", hyper "
                << pp::describe_hyper(family, r.cv.best_hyper) << ", "
                << data.rows() << " rows\n"
                << pp::kMetricsCsvHeader << "\n"
                << pp::metrics_csv_row(pp::to_string(family), r.cv.report) << "\n"
                << "artifact " << r.model.artifact_id() << " -> " << train_out << "\n";
      return 0;
    }

    if (*eval) {
      const pp::MeasurementSet set = load_measurements(eval_data);
      std::vector<pp::Family> families;
      if (eval_family == "all") {
        families.assign(pp::kAllFamilies.begin(), pp::kAllFamilies.end());
      } else {
        families.push_back(pp::parse_family(eval_family));
      }
      const pp::TrainingData data =
          pp::build_training_data(pp::training_filter(set).set, ctx);
      std::cout << pp::kMetricsCsvHeader << "\n";
      int status = 0;
      for (pp::Family f : families) {
        try {
          const pp::CvResult r = pp::repeated_cv(data, f, eval_cv.config());
          std::cout << pp::metrics_csv_row(pp::to_string(f), r.report) << "\n";
        } catch (const pp::Error& e) {
          std::cerr << "error: " << pp::to_string(f) << ": " << e.what() << "\n";
          status = 1;
        }
      }
      return status;
    }

    if (*holdout) {
      const pp::MeasurementSet set = load_measurements(holdout_data);
      const pp::Family family = pp::parse_family(holdout_family);
      const pp::HoldoutResult r =
          pp::holdout_by_model(set, holdout_model, family, holdout_cv.config(), ctx);
      std::cout << pp::kHoldoutCsvHeader << "\n"
                << pp::holdout_csv_row(pp::to_string(family), r.metrics) << "\n";
      std::cerr << "trained on " << r.train_rows << " rows, evaluated "
                << r.eval_rows.size() << " rows of " << holdout_model << "\n";
      if (!importance_out.empty()) {
        const pp::TrainingData all =
            pp::build_training_data(pp::training_filter(set).set, ctx);
        const pp::ImportanceReport imp = pp::permutation_importance(
            r.model, all.subset(r.train_row_indices), holdout_cv.seed);
        std::ostringstream out;
        out << "feature,importance,sd\n";
        for (const pp::ImportanceEntry& e : imp.entries) {
          out << pp::csv::join_line({e.feature, pp::csv::format_double(e.score),
                                     pp::csv::format_double(e.sd)})
              << "\n";
        }
        write_text(importance_out, out.str());
      }
      return 0;
    }

    if (*predict) {
      const pp::TrainedEstimator model = pp::TrainedEstimator::load(predict_artifact);
      pp::ArchitectureDescriptor arch = res.archs.get(predict_model);
      if (!predict_precision.empty()) arch.precision = pp::parse_precision(predict_precision);
      const pp::PromptShape shape{predict_in, predict_out};
      const pp::HardwareConfig hw =
          resolve_hardware(res, arch, predict_gpu, predict_count,
                           static_cast<std::uint64_t>(predict_batch) * shape.total_tokens());
      const pp::EnergyEstimate e =
          pp::estimate_prompt(arch, hw, shape, predict_batch, model);
      std::cout << pp::dump_json({{"model_id", e.model_id},
                                  {"gpu_name", e.gpu_name},
                                  {"gpu_count", e.gpu_count},
                                  {"input_tokens", shape.input_tokens},
                                  {"output_tokens", shape.output_tokens},
                                  {"batch_size", e.batch_size},
                                  {"wh_per_prompt", e.wh_per_prompt},
                                  {"wh_total", e.wh_total},
                                  {"estimator_id", e.estimator_id}})
                << "\n";
      return 0;
    }

    if (*mixed) {
      const pp::TrainedEstimator model = pp::TrainedEstimator::load(mixed_artifact);
      const pp::ArchitectureDescriptor& arch = res.archs.get(mixed_model);
      std::vector<pp::PromptShape> prompts;
      if (!mixed_file.empty()) {
        prompts = read_prompt_file(mixed_file);
      } else if (!mixed_prompts.empty()) {
        prompts = parse_prompt_list(mixed_prompts);
      }
      std::uint64_t kv_tokens = 0;
      for (const auto& p : prompts) kv_tokens += p.total_tokens();
      const pp::HardwareConfig hw =
          resolve_hardware(res, arch, mixed_gpu, mixed_count, kv_tokens);
      const pp::EnergyEstimate e = pp::estimate_mixed_batch(prompts, arch, hw, model);
      std::cout << pp::dump_json({{"model_id", e.model_id},
                                  {"gpu_name", e.gpu_name},
                                  {"gpu_count", e.gpu_count},
                                  {"batch_size", e.batch_size},
                                  {"per_prompt_wh", e.per_prompt_wh},
                                  {"wh_total", e.wh_total},
                                  {"wh_per_prompt", e.wh_per_prompt},
                                  {"estimator_id", e.estimator_id}})
                << "\n";
      return 0;
    }

    if (*report) {
      const pp::TrainedEstimator model = pp::TrainedEstimator::load(report_artifact);
      const auto scores = pp::read_scores_csv(report_scores);
      const pp::TradeoffReport r =
          pp::tradeoff_report(scores, res.archs, res.catalog, model, workload);
      for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
      write_text(report_md, pp::render_markdown(r));
      if (!report_csv.empty()) write_text(report_csv, pp::render_csv(r));
      return 0;
    }

    if (*insight) {
      const pp::EmissionsEstimate co2 = pp::co2_from_energy(insight_wh, insight_intensity);
      const pp::InsightEquivalents eq = pp::insights(insight_wh, co2.grams_co2e, factors);
      std::cout << pp::dump_json({{"wh", insight_wh},
                                  {"grams_co2e", co2.grams_co2e},
                                  {"grid_intensity", co2.grid_intensity},
                                  {"lightbulb_minutes", eq.lightbulb_minutes},
                                  {"tv_minutes", eq.tv_minutes},
                                  {"flight_km", eq.flight_km},
                                  {"factors",
                                   {{"bulb_watts", factors.bulb_watts},
                                    {"tv_watts", factors.tv_watts},
                                    {"flight_g_per_km", factors.flight_g_per_km}}}})
                << "\n";
      return 0;
    }

    if (*serve) {
      pp::ServiceConfig cfg = pp::default_service_config(dir);
      if (!serve_config.empty()) cfg = pp::load_service_config(serve_config, cfg);
      pp::apply_env_overrides(cfg, [](const char* name) { return std::getenv(name); });
      if (!serve_host.empty()) cfg.host = serve_host;
      if (serve_port) cfg.port = *serve_port;
      if (!serve_artifact.empty()) cfg.model_path = serve_artifact;
      pp::validate(cfg);
      pp::EstimationService service(cfg);
      std::thread loader;
      pp::run_http_server(service, [&](const pp::ServerHandle& server) {
        std::cerr << "listening on " << cfg.host << ":" << server.port << "\n";
        loader = std::thread([&service] {
          try {
            service.load_artifact();
            std::cerr << "artifact " << service.artifact()->artifact_id()
                      << " loaded\n";
          } catch (const pp::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
          }
        });
      });
      if (loader.joinable()) loader.join();
      return 0;
    }
  } catch (const pp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
