#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecgfuse/beats.hpp"
#include "ecgfuse/fusion.hpp"
#include "ecgfuse/gaf.hpp"
#include "ecgfuse/metrics.hpp"
#include "ecgfuse/models.hpp"
#include "ecgfuse/noise.hpp"

namespace ecgfuse::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetConfig {
  std::string source = "synthetic";  // synthetic | csv | wfdb
  std::vector<std::string> records;  // wfdb path prefixes
  std::string csv_path;
  std::optional<int> lead;  // override; lead II matched by description otherwise
  int length = 187;
  std::string split_mode = "stratified";  // stratified | record
  double split_ratio = 0.8;
  std::vector<std::string> exclude;  // record names dropped before ingestion
  std::vector<std::size_t> per_class_counts = {240, 120, 120, 60, 60};  // synthetic source
  int m = 5;
  int smote_k = 5;
  bool balance = true;
  double pre_ms = 250.0;
  double post_ms = 400.0;
};

struct ModelConfig {
  int rnn_hidden = 32;
  std::vector<int> rnn_dense = {64, 32};
  int rnn_stride = 4;
  std::vector<int> mlp_hidden = {128, 64};
  models::TrainConfig train;
};

struct FusionConfig {
  fusion::ConflictReduction conflict_reduction = fusion::ConflictReduction::Sum;
  bool renormalize = false;
};

struct SweepConfig {
  std::vector<double> snrs = {15, 10, 5, 0};
  std::vector<noise::Kind> kinds = {noise::Kind::Awgn, noise::Kind::BaselineWander,
                                    noise::Kind::MuscleArtifact, noise::Kind::ElectrodeMotion};
  // Optional WFDB prefixes feeding the nstdb_* kinds, keyed "bw"/"em"/"ma".
  std::map<std::string, std::string> nstdb_records;
  int threads = 0;  // 0 = hardware concurrency
};

struct Config {
  DatasetConfig dataset;
  gaf::Range gaf_range = gaf::Range::Unit;
  int gaf_res = 16;
  ModelConfig models;
  FusionConfig fusion;
  SweepConfig sweep;
  metrics::Averaging average = metrics::Averaging::Macro;
  std::uint64_t seed = 42;
};

// JSON loading with precise error paths (throws ConfigError).
Config load_config(const std::string& path);
Config parse_config(const std::string& json_text);

enum class EvalMethod { View1, View2, Dst, ScoreMean, FeatureLevel };
const char* eval_method_name(EvalMethod m);
inline constexpr EvalMethod kAllMethods[] = {EvalMethod::View1, EvalMethod::View2,
                                             EvalMethod::Dst, EvalMethod::ScoreMean,
                                             EvalMethod::FeatureLevel};

struct ViewInputs {
  std::vector<Eigen::VectorXd> raw;  // normalized beats (view 1)
  std::vector<Eigen::VectorXd> gaf;  // flattened resized GAF (view 2)
};

// Both views for a set of mV beats.
ViewInputs build_views(const std::vector<beats::Beat>& beats_mv, gaf::Range range, int res);

struct Experiment {
  Config config;
  beats::Dataset dataset;  // beats stored in mV
  std::unique_ptr<models::BiRnnClassifier> rnn;
  std::unique_ptr<models::MlpClassifier> mlp;
  std::unique_ptr<fusion::FeatureFusionHead> feature_head;
  models::TrainResult rnn_history;
  models::TrainResult mlp_history;
  std::vector<std::size_t> test_indices;
  std::vector<int> test_labels;
};

// Load the configured dataset (in mV), split, and SMOTE-balance the train
// half.
beats::Dataset load_dataset(const Config& cfg);

// Train both view models plus the feature-fusion baseline head.
Experiment run_training(const Config& cfg);

// Per-method predictions over given view inputs.
std::map<EvalMethod, std::vector<int>> predict_all(const Experiment& exp, const ViewInputs& views);

struct MethodMetrics {
  EvalMethod method;
  metrics::Metrics metrics;
};

// Clean-test evaluation of all five methods; optionally writes metrics JSON
// and the per-beat prediction CSV.
std::vector<MethodMetrics> evaluate_clean(const Experiment& exp, const std::string& out_dir);

struct SweepRow {
  std::string kind;  // noise kind or "clean"
  double snr_db = noise::kCleanSnrDb;
  EvalMethod method = EvalMethod::View1;
  metrics::Metrics metrics;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

// Noise grid over (kind x snr), clean baseline rows first. Cells evaluate on
// worker threads, merged in grid order.
SweepResult noise_sweep(const Experiment& exp, const SweepConfig& sweep);

void write_sweep_csv(const SweepResult& result, const std::string& path);

// Dataset manifest JSON: records, L, seed, split_mode, per-class counts.
void write_manifest(const beats::Dataset& ds, const Config& cfg, const std::string& path);

// Seed for one (noise kind, snr, beat) cell of the grid.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t kind_index, double snr_db,
                          std::uint64_t beat_index);

}  // namespace ecgfuse::harness
