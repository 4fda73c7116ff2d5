// ecgfuse command-line front end.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 numeric
// failure (NaN detected).
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecgfuse/beats.hpp"
#include "ecgfuse/gaf.hpp"
#include "ecgfuse/harness.hpp"
#include "ecgfuse/models.hpp"
#include "ecgfuse/rng.hpp"
#include "ecgfuse/synthetic.hpp"
#include "ecgfuse/wfdb.hpp"

namespace {

using ecgfuse::harness::Config;
using ecgfuse::harness::ConfigError;
using ecgfuse::harness::DataError;
using ecgfuse::harness::NumericError;

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
};

Config load_config_or_default(const GlobalOpts& g) {
  Config cfg = g.config_path.empty() ? ecgfuse::harness::parse_config("{}")
                                     : ecgfuse::harness::load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

int cmd_ingest(const GlobalOpts& g, const std::vector<std::string>& records) {
  const auto cfg = load_config_or_default(g);
  auto prefixes = records.empty() ? cfg.dataset.records : records;
  if (prefixes.empty())
    throw ConfigError("ingest: no records given (positional args or dataset.records)");
  for (const auto& prefix : prefixes) {
    const auto rec = ecgfuse::wfdb::read_record(prefix);
    std::map<std::string, std::size_t> counts;
    for (const auto& ann : rec.annotations)
      if (const auto cls = ecgfuse::wfdb::map_to_aami(ann.symbol))
        ++counts[ecgfuse::wfdb::aami_name(*cls)];
    std::printf("%s: %d signals @ %g Hz, %lld samples, %zu annotations\n",
                rec.header.record_name.c_str(), rec.header.n_signals, rec.header.sampling_rate,
                static_cast<long long>(rec.header.n_samples), rec.annotations.size());
    for (const auto& [name, n] : counts) std::printf("  %s: %zu beats\n", name.c_str(), n);
    const int lead = ecgfuse::wfdb::select_lead(rec.header, cfg.dataset.lead);
    std::printf("  lead: channel %d (%s)\n", lead,
                rec.header.signals[static_cast<std::size_t>(lead)].description.c_str());
  }
  return 0;
}

int cmd_segment(const GlobalOpts& g) {
  const auto cfg = load_config_or_default(g);
  const auto ds = ecgfuse::harness::load_dataset(cfg);
  ensure_out_dir(g.out_dir);

  std::vector<ecgfuse::wfdb::BeatRow> rows;
  for (const auto& b : ds.beats) {
    ecgfuse::wfdb::BeatRow row;
    row.samples = ecgfuse::beats::minmax_normalize(b.samples);
    row.label = b.label;
    rows.push_back(std::move(row));
  }
  const auto csv = g.out_dir + "/beats.csv";
  ecgfuse::wfdb::save_beat_csv(csv, rows);
  ecgfuse::harness::write_manifest(ds, cfg, g.out_dir + "/manifest.json");
  std::printf("wrote %zu beats to %s\n", rows.size(), csv.c_str());
  return 0;
}

int cmd_gaf_export(const GlobalOpts& g, std::size_t count) {
  const auto cfg = load_config_or_default(g);
  const auto ds = ecgfuse::harness::load_dataset(cfg);
  ensure_out_dir(g.out_dir);
  const std::size_t n = std::min(count, ds.beats.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto norm = ecgfuse::beats::minmax_normalize(ds.beats[i].samples);
    const auto gm =
        ecgfuse::gaf::resize(ecgfuse::gaf::gaf_encode(norm, cfg.gaf_range), cfg.gaf_res);
    const auto stem = g.out_dir + "/beat_" + std::to_string(i) + "_class" +
                      std::to_string(ds.beats[i].label);
    ecgfuse::gaf::export_pgm(gm, stem + ".pgm");
    ecgfuse::gaf::export_csv(gm, stem + ".csv");
  }
  std::printf("wrote %zu GAF images (%dx%d) to %s\n", n, cfg.gaf_res, cfg.gaf_res,
              g.out_dir.c_str());
  return 0;
}

int cmd_train(const GlobalOpts& g) {
  const auto cfg = load_config_or_default(g);
  ensure_out_dir(g.out_dir);
  const auto exp = ecgfuse::harness::run_training(cfg);
  ecgfuse::models::save_checkpoint(*exp.rnn, g.out_dir + "/rnn.json", cfg.seed, "");
  ecgfuse::models::save_checkpoint(*exp.mlp, g.out_dir + "/mlp.json", cfg.seed, "");
  ecgfuse::models::save_checkpoint(exp.feature_head->classifier(),
                                   g.out_dir + "/feature_head.json", cfg.seed, "");
  ecgfuse::models::save_history_csv(exp.rnn_history, g.out_dir + "/rnn_history.csv");
  ecgfuse::models::save_history_csv(exp.mlp_history, g.out_dir + "/mlp_history.csv");
  ecgfuse::harness::write_manifest(exp.dataset, cfg, g.out_dir + "/manifest.json");
  std::printf("trained both views; checkpoints in %s\n", g.out_dir.c_str());
  return 0;
}

int cmd_eval(const GlobalOpts& g) {
  const auto cfg = load_config_or_default(g);
  ensure_out_dir(g.out_dir);
  const auto exp = ecgfuse::harness::run_training(cfg);
  const auto rows = ecgfuse::harness::evaluate_clean(exp, g.out_dir);
  for (const auto& r : rows)
    std::printf("%-13s acc %.4f  macroP %.4f  macroR %.4f\n",
                ecgfuse::harness::eval_method_name(r.method), r.metrics.accuracy,
                r.metrics.macro_precision, r.metrics.macro_recall);
  return 0;
}

int cmd_sweep(const GlobalOpts& g) {
  const auto cfg = load_config_or_default(g);
  ensure_out_dir(g.out_dir);
  const auto exp = ecgfuse::harness::run_training(cfg);
  const auto result = ecgfuse::harness::noise_sweep(exp, cfg.sweep);
  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  const auto path = g.out_dir + "/sweep.csv";
  ecgfuse::harness::write_sweep_csv(result, path);
  std::printf("wrote %zu sweep rows to %s\n", result.rows.size(), path.c_str());
  return 0;
}

int cmd_grad_check(const GlobalOpts& g) {
  const auto cfg = load_config_or_default(g);
  ecgfuse::Rng rng(cfg.seed);
  Eigen::VectorXd x_rnn(cfg.dataset.length);
  for (int i = 0; i < x_rnn.size(); ++i) x_rnn[i] = rng.uniform();
  const int gaf_dim = cfg.gaf_res * cfg.gaf_res;
  Eigen::VectorXd x_mlp(gaf_dim);
  for (int i = 0; i < gaf_dim; ++i) x_mlp[i] = rng.uniform(-1.0, 1.0);

  ecgfuse::models::MlpClassifier mlp(gaf_dim, cfg.models.mlp_hidden, cfg.dataset.m,
                                     cfg.seed + 2);
  ecgfuse::models::BiRnnClassifier rnn(cfg.dataset.length, cfg.models.rnn_hidden,
                                       cfg.models.rnn_dense, cfg.dataset.m,
                                       cfg.models.rnn_stride, cfg.seed + 1);
  const auto rm = ecgfuse::models::grad_check(mlp, x_mlp, 0, 1e-5, 200, cfg.seed);
  const auto rr = ecgfuse::models::grad_check(rnn, x_rnn, 0, 1e-5, 200, cfg.seed);
  if (std::isnan(rm.max_rel_error) || std::isnan(rr.max_rel_error))
    throw NumericError("grad-check produced NaN");
  std::printf("mlp:   max rel error %.3e over %d coords (worst: %s)\n", rm.max_rel_error,
              rm.coords_checked, rm.worst_tensor.c_str());
  std::printf("birnn: max rel error %.3e over %d coords (worst: %s)\n", rr.max_rel_error,
              rr.coords_checked, rr.worst_tensor.c_str());
  const bool ok = rm.max_rel_error < 1e-6 && rr.max_rel_error < 1e-4;
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware multi-view ECG beat classifier"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  std::uint64_t seed_opt = 0;
  auto* seed_flag = app.add_option("--seed", seed_opt, "Override the config seed");
  app.add_option("--out-dir", g.out_dir, "Output directory (default: out)");

  auto* ingest = app.add_subcommand("ingest", "Read WFDB records and summarize them");
  std::vector<std::string> records;
  ingest->add_option("records", records, "WFDB record path prefixes");

  auto* segment = app.add_subcommand("segment", "Segment beats and write beats.csv");
  auto* gaf_export = app.add_subcommand("gaf-export", "Write GAF images for the first beats");
  std::size_t gaf_count = 16;
  gaf_export->add_option("--count", gaf_count, "Number of beats to export (default 16)");
  auto* train = app.add_subcommand("train", "Train both view models and save checkpoints");
  auto* eval = app.add_subcommand("eval", "Train and evaluate all methods on the clean test set");
  auto* sweep = app.add_subcommand("sweep", "Train and run the noise sweep grid");
  auto* grad = app.add_subcommand("grad-check", "Finite-difference gradient verification");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (seed_flag->count() > 0) g.seed = seed_opt;

  try {
    if (ingest->parsed()) return cmd_ingest(g, records);
    if (segment->parsed()) return cmd_segment(g);
    if (gaf_export->parsed()) return cmd_gaf_export(g, gaf_count);
    if (train->parsed()) return cmd_train(g);
    if (eval->parsed()) return cmd_eval(g);
    if (sweep->parsed()) return cmd_sweep(g);
    if (grad->parsed()) return cmd_grad_check(g);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  }
  return 0;
}
