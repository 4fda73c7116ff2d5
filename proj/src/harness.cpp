#include "ecgfuse/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ecgfuse/rng.hpp"
#include "ecgfuse/synthetic.hpp"

namespace ecgfuse::harness {

using nlohmann::json;

const char* eval_method_name(EvalMethod m) {
  switch (m) {
    case EvalMethod::View1: return "view1";
    case EvalMethod::View2: return "view2";
    case EvalMethod::Dst: return "dst";
    case EvalMethod::ScoreMean: return "score";
    case EvalMethod::FeatureLevel: return "feature";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Config

namespace {

// Fetch j[key] as T, reporting the full dotted path on failure.
template <typename T>
void get_to(const json& j, const std::string& path, const std::string& key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key + ": " + e.what());
  }
}

void parse_dataset(const json& j, DatasetConfig& d) {
  get_to(j, "dataset", "source", d.source);
  get_to(j, "dataset", "records", d.records);
  get_to(j, "dataset", "csv_path", d.csv_path);
  if (j.contains("lead") && !j.at("lead").is_null()) {
    int lead = 0;
    get_to(j, "dataset", "lead", lead);
    d.lead = lead;
  }
  get_to(j, "dataset", "L", d.length);
  get_to(j, "dataset", "split_mode", d.split_mode);
  get_to(j, "dataset", "split_ratio", d.split_ratio);
  get_to(j, "dataset", "exclude", d.exclude);
  get_to(j, "dataset", "per_class_counts", d.per_class_counts);
  get_to(j, "dataset", "m", d.m);
  get_to(j, "dataset", "smote_k", d.smote_k);
  get_to(j, "dataset", "balance", d.balance);
  get_to(j, "dataset", "pre_ms", d.pre_ms);
  get_to(j, "dataset", "post_ms", d.post_ms);
  if (d.source != "synthetic" && d.source != "csv" && d.source != "wfdb")
    throw ConfigError("dataset.source: expected synthetic|csv|wfdb, got '" + d.source + "'");
  if (d.split_mode != "stratified" && d.split_mode != "record")
    throw ConfigError("dataset.split_mode: expected stratified|record, got '" + d.split_mode + "'");
  if (d.length < 2) throw ConfigError("dataset.L: must be >= 2");
  if (d.m < 2 || d.m > wfdb::kNumAamiClasses)
    throw ConfigError("dataset.m: must be in [2, 5]");
  if (d.split_ratio <= 0 || d.split_ratio >= 1)
    throw ConfigError("dataset.split_ratio: must be in (0, 1)");
}

void parse_models(const json& j, ModelConfig& m) {
  if (j.contains("rnn")) {
    const auto& r = j.at("rnn");
    get_to(r, "models.rnn", "hidden", m.rnn_hidden);
    get_to(r, "models.rnn", "dense", m.rnn_dense);
    get_to(r, "models.rnn", "stride", m.rnn_stride);
  }
  if (j.contains("mlp")) get_to(j.at("mlp"), "models.mlp", "hidden", m.mlp_hidden);
  if (j.contains("train")) {
    const auto& t = j.at("train");
    get_to(t, "models.train", "lr", m.train.lr);
    get_to(t, "models.train", "batch", m.train.batch);
    get_to(t, "models.train", "max_epochs", m.train.max_epochs);
    get_to(t, "models.train", "patience", m.train.patience);
    get_to(t, "models.train", "val_fraction", m.train.val_fraction);
    get_to(t, "models.train", "beta1", m.train.beta1);
    get_to(t, "models.train", "beta2", m.train.beta2);
    get_to(t, "models.train", "eps", m.train.eps);
  }
  if (m.train.lr < 0) throw ConfigError("models.train.lr: must be >= 0");
  if (m.train.batch < 1) throw ConfigError("models.train.batch: must be >= 1");
  if (m.rnn_stride < 1) throw ConfigError("models.rnn.stride: must be >= 1");
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  Config cfg;
  if (j.contains("dataset")) parse_dataset(j.at("dataset"), cfg.dataset);
  if (j.contains("gaf")) {
    std::string range = "unit";
    get_to(j.at("gaf"), "gaf", "range", range);
    try {
      cfg.gaf_range = gaf::range_from_name(range);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("gaf.range: ") + e.what());
    }
    get_to(j.at("gaf"), "gaf", "res", cfg.gaf_res);
    if (cfg.gaf_res < 1) throw ConfigError("gaf.res: must be >= 1");
  }
  if (j.contains("models")) parse_models(j.at("models"), cfg.models);
  if (j.contains("fusion")) {
    std::string red = "sum";
    get_to(j.at("fusion"), "fusion", "conflict_reduction", red);
    try {
      cfg.fusion.conflict_reduction = fusion::conflict_reduction_from_name(red);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("fusion.conflict_reduction: ") + e.what());
    }
    get_to(j.at("fusion"), "fusion", "renormalize", cfg.fusion.renormalize);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    get_to(s, "sweep", "snrs", cfg.sweep.snrs);
    if (s.contains("kinds")) {
      std::vector<std::string> kinds;
      get_to(s, "sweep", "kinds", kinds);
      cfg.sweep.kinds.clear();
      for (const auto& k : kinds) {
        try {
          cfg.sweep.kinds.push_back(noise::kind_from_name(k));
        } catch (const std::exception& e) {
          throw ConfigError(std::string("sweep.kinds: ") + e.what());
        }
      }
    }
    get_to(s, "sweep", "nstdb_records", cfg.sweep.nstdb_records);
    get_to(s, "sweep", "threads", cfg.sweep.threads);
  }
  if (j.contains("average")) {
    std::string avg;
    get_to(j, "", "average", avg);
    if (avg == "macro")
      cfg.average = metrics::Averaging::Macro;
    else if (avg == "weighted")
      cfg.average = metrics::Averaging::Weighted;
    else
      throw ConfigError("average: expected macro|weighted, got '" + avg + "'");
  }
  get_to(j, "", "seed", cfg.seed);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// ---------------------------------------------------------------------------
// Dataset loading

namespace {

std::vector<beats::Beat> beats_from_wfdb(const DatasetConfig& d) {
  std::vector<beats::Beat> all;
  for (const auto& prefix : d.records) {
    const auto slash = prefix.find_last_of('/');
    const std::string short_name = slash == std::string::npos ? prefix : prefix.substr(slash + 1);
    if (std::find(d.exclude.begin(), d.exclude.end(), short_name) != d.exclude.end()) continue;
    wfdb::Record rec;
    try {
      rec = wfdb::read_record(prefix);
    } catch (const std::exception& e) {
      throw DataError("record " + prefix + ": " + e.what());
    }
    const int lead = wfdb::select_lead(rec.header, d.lead);
    std::vector<int> chan(static_cast<std::size_t>(rec.header.n_samples));
    for (std::size_t i = 0; i < chan.size(); ++i)
      chan[i] = rec.samples_adu[i][static_cast<std::size_t>(lead)];
    const auto& sig = rec.header.signals[static_cast<std::size_t>(lead)];
    const auto mv = wfdb::adu_to_mv(chan, sig.gain, sig.baseline);
    beats::SegmentParams params;
    params.pre_ms = d.pre_ms;
    params.post_ms = d.post_ms;
    params.length = d.length;
    auto bs = beats::segment_beats(mv, rec.header.sampling_rate, rec.annotations,
                                   rec.header.record_name, params);
    all.insert(all.end(), bs.begin(), bs.end());
  }
  if (all.empty()) throw DataError("no beats found in the configured records");
  return all;
}

beats::Dataset record_split(std::vector<beats::Beat> all, const DatasetConfig& d,
                            std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& b : all)
    if (std::find(ids.begin(), ids.end(), b.record_id) == ids.end()) ids.push_back(b.record_id);
  if (ids.size() < 2)
    throw ConfigError("dataset.split_mode: record split needs at least 2 records");
  Rng rng(seed);
  rng.shuffle(ids);
  const auto n_train = static_cast<std::size_t>(
      std::floor(d.split_ratio * static_cast<double>(ids.size())));
  std::set<std::string> train_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(
                                                                 std::max<std::size_t>(1, n_train)));
  beats::Dataset ds;
  ds.m = d.m;
  ds.seed = seed;
  ds.beats = std::move(all);
  ds.split.reserve(ds.beats.size());
  for (const auto& b : ds.beats)
    ds.split.push_back(train_ids.count(b.record_id) ? beats::Split::Train : beats::Split::Test);
  return ds;
}

}  // namespace

beats::Dataset load_dataset(const Config& cfg) {
  const auto& d = cfg.dataset;
  std::vector<beats::Beat> all;
  if (d.source == "synthetic") {
    if (static_cast<int>(d.per_class_counts.size()) != d.m)
      throw ConfigError("dataset.per_class_counts: needs exactly m entries");
    all = synthetic::make_beats(d.per_class_counts, d.length, cfg.seed);
  } else if (d.source == "csv") {
    if (d.csv_path.empty()) throw ConfigError("dataset.csv_path: required for csv source");
    std::vector<wfdb::BeatRow> rows;
    try {
      rows = wfdb::load_beat_csv(d.csv_path, d.m);
    } catch (const std::exception& e) {
      throw DataError(std::string("beat CSV: ") + e.what());
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      beats::Beat b;
      b.samples = std::move(rows[i].samples);
      b.label = rows[i].label;
      b.record_id = "csv";
      b.r_peak = static_cast<std::int64_t>(i);
      all.push_back(std::move(b));
    }
    if (all.empty()) throw DataError("beat CSV is empty: " + d.csv_path);
  } else {
    if (d.records.empty()) throw ConfigError("dataset.records: required for wfdb source");
    all = beats_from_wfdb(d);
  }

  if (d.split_mode == "record") {
    auto ds = record_split(std::move(all), d, cfg.seed);
    if (!d.balance) return ds;
    std::vector<beats::Beat> train, test;
    for (std::size_t i = 0; i < ds.beats.size(); ++i)
      (ds.split[i] == beats::Split::Train ? train : test).push_back(ds.beats[i]);
    auto res = beats::smote(train, d.m, d.smote_k, cfg.seed);
    beats::Dataset out;
    out.m = d.m;
    out.seed = cfg.seed;
    out.beats = std::move(res.beats);
    out.split.assign(out.beats.size(), beats::Split::Train);
    for (auto& b : test) {
      out.beats.push_back(std::move(b));
      out.split.push_back(beats::Split::Test);
    }
    return out;
  }
  return beats::make_dataset(std::move(all), d.m, d.split_ratio, d.smote_k, cfg.seed, d.balance);
}

// ---------------------------------------------------------------------------
// Views and training

ViewInputs build_views(const std::vector<beats::Beat>& beats_mv, gaf::Range range, int res) {
  ViewInputs v;
  v.raw.reserve(beats_mv.size());
  v.gaf.reserve(beats_mv.size());
  for (const auto& b : beats_mv) {
    const auto norm = beats::minmax_normalize(b.samples);
    Eigen::VectorXd raw(static_cast<Eigen::Index>(norm.size()));
    for (std::size_t i = 0; i < norm.size(); ++i) raw[static_cast<Eigen::Index>(i)] = norm[i];
    v.raw.push_back(std::move(raw));
    const auto g = gaf::resize(gaf::gaf_encode(norm, range), res);
    Eigen::VectorXd flat(g.size());
    std::copy(g.data(), g.data() + g.size(), flat.data());
    v.gaf.push_back(std::move(flat));
  }
  return v;
}

Experiment run_training(const Config& cfg) {
  Experiment exp;
  exp.config = cfg;
  exp.dataset = load_dataset(cfg);

  const auto train_idx = exp.dataset.indices(beats::Split::Train);
  exp.test_indices = exp.dataset.indices(beats::Split::Test);
  if (train_idx.empty()) throw DataError("empty training split");
  if (exp.test_indices.empty()) throw DataError("empty test split");

  std::vector<beats::Beat> train_beats, test_beats;
  std::vector<int> train_labels;
  for (auto i : train_idx) {
    train_beats.push_back(exp.dataset.beats[i]);
    train_labels.push_back(exp.dataset.beats[i].label);
  }
  for (auto i : exp.test_indices) {
    test_beats.push_back(exp.dataset.beats[i]);
    exp.test_labels.push_back(exp.dataset.beats[i].label);
  }

  const auto train_views = build_views(train_beats, cfg.gaf_range, cfg.gaf_res);

  models::TrainConfig tc = cfg.models.train;
  tc.seed = cfg.seed;
  exp.rnn = std::make_unique<models::BiRnnClassifier>(
      cfg.dataset.length, cfg.models.rnn_hidden, cfg.models.rnn_dense, cfg.dataset.m,
      cfg.models.rnn_stride, cfg.seed + 1);
  exp.rnn_history = models::train(*exp.rnn, train_views.raw, train_labels, tc);

  exp.mlp = std::make_unique<models::MlpClassifier>(cfg.gaf_res * cfg.gaf_res,
                                                    cfg.models.mlp_hidden, cfg.dataset.m,
                                                    cfg.seed + 2);
  exp.mlp_history = models::train(*exp.mlp, train_views.gaf, train_labels, tc);

  // Feature-level baseline head on the trained views' penultimate features.
  std::vector<Eigen::VectorXd> f1, f2;
  for (std::size_t i = 0; i < train_views.raw.size(); ++i) {
    f1.push_back(exp.rnn->features(train_views.raw[i]));
    f2.push_back(exp.mlp->features(train_views.gaf[i]));
  }
  exp.feature_head = std::make_unique<fusion::FeatureFusionHead>(
      static_cast<int>(f1[0].size()), static_cast<int>(f2[0].size()), cfg.dataset.m,
      cfg.seed + 3);
  exp.feature_head->fit(f1, f2, train_labels, tc);
  return exp;
}

std::map<EvalMethod, std::vector<int>> predict_all(const Experiment& exp,
                                                   const ViewInputs& views) {
  std::map<EvalMethod, std::vector<int>> out;
  for (auto m : kAllMethods) out[m] = {};
  for (std::size_t i = 0; i < views.raw.size(); ++i) {
    const Eigen::VectorXd p1 = exp.rnn->predict(views.raw[i]);
    const Eigen::VectorXd p2 = exp.mlp->predict(views.gaf[i]);
    out[EvalMethod::View1].push_back(fusion::argmax_lowest(p1));
    out[EvalMethod::View2].push_back(fusion::argmax_lowest(p2));
    out[EvalMethod::Dst].push_back(fusion::dst_fuse(p1, p2, exp.config.fusion.renormalize,
                                                    exp.config.fusion.conflict_reduction)
                                       .chosen);
    out[EvalMethod::ScoreMean].push_back(fusion::score_fuse(p1, p2).chosen);
    out[EvalMethod::FeatureLevel].push_back(
        exp.feature_head->predict(exp.rnn->features(views.raw[i]), exp.mlp->features(views.gaf[i]))
            .chosen);
  }
  return out;
}

namespace {

json metrics_to_json(const metrics::Metrics& m) {
  json j;
  j["accuracy"] = m.accuracy;
  j["macro_precision"] = m.macro_precision;
  j["macro_recall"] = m.macro_recall;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["confusion"] = m.confusion;
  return j;
}

void check_finite(const metrics::Metrics& m) {
  if (!std::isfinite(m.accuracy) || !std::isfinite(m.macro_precision) ||
      !std::isfinite(m.macro_recall))
    throw NumericError("non-finite metric value");
}

}  // namespace

std::vector<MethodMetrics> evaluate_clean(const Experiment& exp, const std::string& out_dir) {
  std::vector<beats::Beat> test_beats;
  for (auto i : exp.test_indices) test_beats.push_back(exp.dataset.beats[i]);
  const auto views = build_views(test_beats, exp.config.gaf_range, exp.config.gaf_res);
  const auto preds = predict_all(exp, views);

  std::vector<MethodMetrics> out;
  json jm;
  for (auto m : kAllMethods) {
    MethodMetrics mm;
    mm.method = m;
    mm.metrics = metrics::compute_metrics(exp.test_labels, preds.at(m),
                                          exp.dataset.m, exp.config.average);
    check_finite(mm.metrics);
    jm[eval_method_name(m)] = metrics_to_json(mm.metrics);
    out.push_back(std::move(mm));
  }

  if (!out_dir.empty()) {
    {
      std::ofstream f(out_dir + "/metrics.json");
      if (!f) throw DataError("cannot write " + out_dir + "/metrics.json");
      f << jm.dump(2) << '\n';
    }
    std::ofstream f(out_dir + "/predictions.csv");
    if (!f) throw DataError("cannot write " + out_dir + "/predictions.csv");
    f << "beat_id,true_label";
    const int m = exp.dataset.m;
    for (int c = 0; c < m; ++c) f << ",p1_" << c;
    for (int c = 0; c < m; ++c) f << ",p2_" << c;
    for (int c = 0; c < m; ++c) f << ",fused_" << c;
    f << ",chosen_view1,chosen_view2,chosen_dst,chosen_score,chosen_feature\n";
    f.precision(9);
    for (std::size_t i = 0; i < views.raw.size(); ++i) {
      const Eigen::VectorXd p1 = exp.rnn->predict(views.raw[i]);
      const Eigen::VectorXd p2 = exp.mlp->predict(views.gaf[i]);
      const auto fused = fusion::dst_fuse(p1, p2, exp.config.fusion.renormalize,
                                          exp.config.fusion.conflict_reduction);
      f << exp.test_indices[i] << ',' << exp.test_labels[i];
      for (int c = 0; c < m; ++c) f << ',' << p1[c];
      for (int c = 0; c < m; ++c) f << ',' << p2[c];
      for (int c = 0; c < m; ++c) f << ',' << fused.scores[c];
      f << ',' << preds.at(EvalMethod::View1)[i] << ',' << preds.at(EvalMethod::View2)[i] << ','
        << preds.at(EvalMethod::Dst)[i] << ',' << preds.at(EvalMethod::ScoreMean)[i] << ','
        << preds.at(EvalMethod::FeatureLevel)[i] << '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Noise sweep

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t kind_index, double snr_db,
                          std::uint64_t beat_index) {
  auto mix = [](std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return h;
  };
  std::uint64_t h = root;
  h = mix(h, kind_index);
  h = mix(h, static_cast<std::uint64_t>(
                 static_cast<std::int64_t>(std::llround(std::isfinite(snr_db) ? snr_db * 1000.0
                                                                              : -1.0))));
  h = mix(h, beat_index);
  return h;
}

namespace {

struct Cell {
  std::optional<noise::Kind> kind;  // nullopt = clean baseline
  double snr_db = noise::kCleanSnrDb;
};

std::vector<double> load_nstdb_channel(const std::string& prefix) {
  const auto rec = wfdb::read_record(prefix);
  std::vector<int> chan(static_cast<std::size_t>(rec.header.n_samples));
  for (std::size_t i = 0; i < chan.size(); ++i) chan[i] = rec.samples_adu[i][0];
  const auto& sig = rec.header.signals[0];
  return wfdb::adu_to_mv(chan, sig.gain, sig.baseline);
}

}  // namespace

SweepResult noise_sweep(const Experiment& exp, const SweepConfig& sweep) {
  SweepResult result;

  std::vector<Cell> cells;
  cells.push_back({});  // clean baseline
  std::set<std::pair<int, long>> seen;
  for (auto kind : sweep.kinds)
    for (double snr : sweep.snrs) {
      const auto key = std::make_pair(static_cast<int>(kind),
                                      static_cast<long>(std::llround(snr * 1000.0)));
      if (!seen.insert(key).second) {
        result.warnings.push_back(std::string("duplicate sweep cell (") + noise::kind_name(kind) +
                                  ", " + std::to_string(snr) + " dB) skipped");
        continue;
      }
      cells.push_back(Cell{kind, snr});
    }

  // NSTDB channels loaded once, shared read-only across workers.
  std::map<noise::Kind, std::vector<double>> nstdb;
  for (auto kind : sweep.kinds) {
    if (!noise::kind_needs_record(kind)) continue;
    const std::string key = kind == noise::Kind::NstdbBw   ? "bw"
                            : kind == noise::Kind::NstdbEm ? "em"
                                                           : "ma";
    auto it = sweep.nstdb_records.find(key);
    if (it == sweep.nstdb_records.end())
      throw DataError("sweep kind nstdb_" + key + " needs sweep.nstdb_records[\"" + key + "\"]");
    nstdb[kind] = load_nstdb_channel(it->second);
  }

  std::vector<beats::Beat> test_beats;
  for (auto i : exp.test_indices) test_beats.push_back(exp.dataset.beats[i]);

  std::vector<std::vector<SweepRow>> cell_rows(cells.size());
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run_cell = [&](std::size_t ci) {
    const Cell& cell = cells[ci];
    std::vector<beats::Beat> noisy;
    noisy.reserve(test_beats.size());
    if (!cell.kind) {
      for (const auto& b : test_beats) {
        beats::Beat nb = b;
        nb.samples = beats::minmax_normalize(b.samples);
        noisy.push_back(std::move(nb));
      }
    } else {
      const auto kind_index = static_cast<std::uint64_t>(*cell.kind);
      const std::vector<double>* rec =
          nstdb.count(*cell.kind) ? &nstdb.at(*cell.kind) : nullptr;
      for (std::size_t i = 0; i < test_beats.size(); ++i) {
        noise::NoiseSpec spec;
        spec.kind = *cell.kind;
        spec.snr_db = cell.snr_db;
        spec.seed = derive_seed(exp.config.seed, kind_index, cell.snr_db, i);
        noisy.push_back(noise::apply_noise(test_beats[i], spec, rec));
      }
    }
    // Beats are already normalized here; build_views normalizes idempotently.
    const auto views = build_views(noisy, exp.config.gaf_range, exp.config.gaf_res);
    const auto preds = predict_all(exp, views);
    for (auto m : kAllMethods) {
      SweepRow row;
      row.kind = cell.kind ? noise::kind_name(*cell.kind) : "clean";
      row.snr_db = cell.snr_db;
      row.method = m;
      row.metrics = metrics::compute_metrics(exp.test_labels, preds.at(m), exp.dataset.m,
                                             exp.config.average);
      check_finite(row.metrics);
      row.seed = exp.config.seed;
      cell_rows[ci].push_back(std::move(row));
    }
  };

  unsigned n_threads = sweep.threads > 0 ? static_cast<unsigned>(sweep.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(cells.size()));
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < n_threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t ci = t; ci < cells.size(); ci += n_threads) {
        try {
          run_cell(ci);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);

  for (auto& rows : cell_rows)
    for (auto& r : rows) result.rows.push_back(std::move(r));
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write sweep CSV: " + path);
  f << "kind,snr_db,method,accuracy,macro_precision,macro_recall,seed\n";
  f.precision(9);
  for (const auto& r : result.rows) {
    f << r.kind << ',';
    if (std::isinf(r.snr_db))
      f << "inf";
    else
      f << r.snr_db;
    f << ',' << eval_method_name(r.method) << ',' << r.metrics.accuracy << ','
      << r.metrics.macro_precision << ',' << r.metrics.macro_recall << ',' << r.seed << '\n';
  }
}

void write_manifest(const beats::Dataset& ds, const Config& cfg, const std::string& path) {
  json j;
  j["records"] = cfg.dataset.records;
  j["source"] = cfg.dataset.source;
  j["L"] = cfg.dataset.length;
  j["seed"] = ds.seed;
  j["split_mode"] = cfg.dataset.split_mode;
  json counts;
  counts["train"] = ds.class_counts(beats::Split::Train);
  counts["test"] = ds.class_counts(beats::Split::Test);
  j["class_counts"] = counts;
  std::ofstream f(path);
  if (!f) throw DataError("cannot write manifest: " + path);
  f << j.dump(2) << '\n';
}

}  // namespace ecgfuse::harness
