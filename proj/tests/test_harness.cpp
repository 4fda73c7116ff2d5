#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ecgfuse/harness.hpp"
#include "ecgfuse/synthetic.hpp"

using namespace ecgfuse;
using namespace ecgfuse::harness;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small but learnable setup so the full pipeline runs in seconds.
Config tiny_config() {
  Config cfg;
  cfg.dataset.per_class_counts = {24, 12, 12};
  cfg.dataset.m = 3;
  cfg.dataset.smote_k = 3;
  cfg.gaf_res = 8;
  cfg.models.rnn_hidden = 8;
  cfg.models.rnn_dense = {8};
  cfg.models.rnn_stride = 8;
  cfg.models.mlp_hidden = {16};
  cfg.models.train.max_epochs = 8;
  cfg.models.train.patience = 0;
  cfg.models.train.val_fraction = 0.0;
  cfg.sweep.snrs = {5.0};
  cfg.sweep.kinds = {noise::Kind::Awgn};
  cfg.sweep.threads = 2;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

TEST_CASE("compute_metrics closed forms") {
  SUBCASE("perfect predictions") {
    const auto m = metrics::compute_metrics({0, 1, 2, 1}, {0, 1, 2, 1}, 3);
    CHECK(m.accuracy == doctest::Approx(1.0));
    CHECK(m.macro_precision == doctest::Approx(1.0));
    CHECK(m.macro_recall == doctest::Approx(1.0));
  }
  SUBCASE("two-class confusion [[8,2],[1,9]]") {
    std::vector<int> truths, preds;
    auto emit = [&](int t, int p, int n) {
      for (int i = 0; i < n; ++i) {
        truths.push_back(t);
        preds.push_back(p);
      }
    };
    emit(0, 0, 8);
    emit(0, 1, 2);
    emit(1, 0, 1);
    emit(1, 1, 9);
    const auto m = metrics::compute_metrics(truths, preds, 2);
    CHECK(m.confusion[0][0] == 8);
    CHECK(m.confusion[0][1] == 2);
    CHECK(m.confusion[1][0] == 1);
    CHECK(m.confusion[1][1] == 9);
    CHECK(m.accuracy == doctest::Approx(0.85));
    CHECK(m.precision[0] == doctest::Approx(8.0 / 9.0));
    CHECK(m.precision[1] == doctest::Approx(9.0 / 11.0));
    CHECK(m.macro_precision == doctest::Approx(0.5 * (8.0 / 9.0 + 9.0 / 11.0)));
    CHECK(m.recall[0] == doctest::Approx(0.8));
    CHECK(m.recall[1] == doctest::Approx(0.9));
    CHECK(m.macro_recall == doctest::Approx(0.85));
  }
  SUBCASE("constant predictor on a balanced set") {
    const auto m = metrics::compute_metrics({0, 0, 1, 1}, {0, 0, 0, 0}, 2);
    CHECK(m.accuracy == doctest::Approx(0.5));
    CHECK(m.macro_recall == doctest::Approx(0.5));
    CHECK(m.precision[1] == 0.0);  // empty predicted column
    CHECK(m.macro_precision == doctest::Approx(0.25));
  }
  SUBCASE("macro averaging skips classes absent from the truths") {
    const auto m = metrics::compute_metrics({0, 0, 1, 1}, {0, 0, 1, 0}, 3);
    CHECK(m.macro_recall == doctest::Approx(0.75));  // class 2 not averaged in
  }
  SUBCASE("weighted averaging weights by true-class frequency") {
    const auto m =
        metrics::compute_metrics({0, 0, 0, 1}, {0, 0, 0, 0}, 2, metrics::Averaging::Weighted);
    CHECK(m.macro_recall == doctest::Approx(0.75));
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(metrics::compute_metrics({0, 1}, {0}, 2), metrics::LengthMismatch);
    CHECK_THROWS_AS(metrics::compute_metrics({0, 2}, {0, 0}, 2), metrics::LabelOutOfRange);
    CHECK_THROWS_AS(metrics::compute_metrics({0, -1}, {0, 0}, 2), metrics::LabelOutOfRange);
  }
}

TEST_CASE("config parsing") {
  SUBCASE("defaults from an empty object") {
    const auto cfg = parse_config("{}");
    CHECK(cfg.seed == 42);
    CHECK(cfg.dataset.source == "synthetic");
    CHECK(cfg.dataset.length == 187);
    CHECK(cfg.gaf_res == 16);
    CHECK(cfg.sweep.snrs == std::vector<double>{15, 10, 5, 0});
    CHECK(cfg.sweep.kinds.size() == 4);
  }
  SUBCASE("round-trip of explicit fields") {
    const auto cfg = parse_config(R"({
      "seed": 7,
      "dataset": {"source": "synthetic", "L": 64, "split_ratio": 0.75,
                   "per_class_counts": [10, 5, 5, 0, 0]},
      "gaf": {"range": "symmetric", "res": 12},
      "fusion": {"conflict_reduction": "product", "renormalize": true},
      "sweep": {"snrs": [10, 0], "kinds": ["awgn", "bw"], "threads": 3}
    })");
    CHECK(cfg.seed == 7);
    CHECK(cfg.dataset.length == 64);
    CHECK(cfg.dataset.split_ratio == doctest::Approx(0.75));
    CHECK(cfg.gaf_range == gaf::Range::Symmetric);
    CHECK(cfg.gaf_res == 12);
    CHECK(cfg.fusion.conflict_reduction == fusion::ConflictReduction::Product);
    CHECK(cfg.fusion.renormalize);
    CHECK(cfg.sweep.snrs == std::vector<double>{10, 0});
    CHECK(cfg.sweep.kinds ==
          std::vector<noise::Kind>{noise::Kind::Awgn, noise::Kind::BaselineWander});
    CHECK(cfg.sweep.threads == 3);
  }
  SUBCASE("errors carry the offending dotted path") {
    auto message_of = [](const std::string& text) {
      try {
        parse_config(text);
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string("<no throw>");
    };
    CHECK(message_of(R"({"dataset": {"split_ratio": 1.5}})").find("dataset.split_ratio") !=
          std::string::npos);
    CHECK(message_of(R"({"gaf": {"res": 0}})").find("gaf.res") != std::string::npos);
    CHECK(message_of(R"({"gaf": {"range": "weird"}})").find("gaf.range") != std::string::npos);
    CHECK(message_of(R"({"sweep": {"kinds": ["nope"]}})").find("sweep.kinds") !=
          std::string::npos);
    CHECK(message_of(R"({"dataset": {"source": "tape"}})").find("dataset.source") !=
          std::string::npos);
    CHECK(message_of("{nonsense").find("json") != std::string::npos);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
  }
}

TEST_CASE("derive_seed separates grid cells") {
  const auto a = derive_seed(42, 0, 5.0, 0);
  CHECK(a == derive_seed(42, 0, 5.0, 0));
  CHECK(a != derive_seed(42, 1, 5.0, 0));
  CHECK(a != derive_seed(42, 0, 10.0, 0));
  CHECK(a != derive_seed(42, 0, 5.0, 1));
  CHECK(a != derive_seed(43, 0, 5.0, 0));
}

TEST_CASE("build_views shapes") {
  const auto raw = synthetic::make_beats({3, 0, 0, 0, 0}, 64, 5);
  std::vector<beats::Beat> mv(raw.begin(), raw.end());
  const auto views = build_views(mv, gaf::Range::Unit, 8);
  REQUIRE(views.raw.size() == 3);
  REQUIRE(views.gaf.size() == 3);
  CHECK(views.raw[0].size() == 64);
  CHECK(views.gaf[0].size() == 64);  // 8x8 flattened
  for (int i = 0; i < views.raw[0].size(); ++i) {
    CHECK(views.raw[0][i] >= 0.0);
    CHECK(views.raw[0][i] <= 1.0);
  }
  CHECK(views.gaf[0].cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("load_dataset balances the train half and leaves the test half alone") {
  auto cfg = tiny_config();
  const auto ds = load_dataset(cfg);
  const auto train_counts = ds.class_counts(beats::Split::Train);
  const auto test_counts = ds.class_counts(beats::Split::Test);
  CHECK(train_counts[0] == train_counts[1]);
  CHECK(train_counts[1] == train_counts[2]);
  // 20% per class: 5 / 3 / 3 beats
  CHECK(test_counts[0] == 5);
  CHECK(test_counts[1] == 3);
  CHECK(test_counts[2] == 3);

  SUBCASE("deterministic under the same seed") {
    const auto again = load_dataset(cfg);
    const auto ti = ds.indices(beats::Split::Test);
    const auto ti2 = again.indices(beats::Split::Test);
    REQUIRE(ti == ti2);
    for (std::size_t i : ti) CHECK(again.beats[i].samples == ds.beats[i].samples);
  }
}

TEST_CASE("full pipeline: train, evaluate, sweep") {
  auto cfg = tiny_config();
  const auto exp = run_training(cfg);
  REQUIRE(exp.rnn != nullptr);
  REQUIRE(exp.mlp != nullptr);
  REQUIRE(!exp.test_labels.empty());

  const auto dir = std::filesystem::temp_directory_path() / "ecgfuse_harness_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  SUBCASE("clean evaluation covers all five methods and writes artifacts") {
    const auto rows = evaluate_clean(exp, dir.string());
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
      CHECK(r.metrics.accuracy >= 0.0);
      CHECK(r.metrics.accuracy <= 1.0);
    }
    CHECK(std::filesystem::exists(dir / "metrics.json"));
    CHECK(std::filesystem::exists(dir / "predictions.csv"));
    std::ifstream in(dir / "predictions.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.find("true_label") != std::string::npos);
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == exp.test_labels.size());
  }

  SUBCASE("sweep layout: clean rows first, then kind x snr x method") {
    const auto result = noise_sweep(exp, cfg.sweep);
    // 5 clean + 1 kind * 1 snr * 5 methods
    REQUIRE(result.rows.size() == 10);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(result.rows[i].kind == "clean");
      CHECK(std::isinf(result.rows[i].snr_db));
    }
    for (std::size_t i = 5; i < 10; ++i) {
      CHECK(result.rows[i].kind == "awgn");
      CHECK(result.rows[i].snr_db == 5.0);
    }
    CHECK(result.warnings.empty());
  }

  SUBCASE("default grid size is 85 rows") {
    SweepConfig full;  // defaults: 4 snrs x 4 kinds
    full.threads = 2;
    const auto result = noise_sweep(exp, full);
    CHECK(result.rows.size() == 4 * 4 * 5 + 5);
  }

  SUBCASE("duplicate grid cells are deduplicated with a warning") {
    auto sweep = cfg.sweep;
    sweep.snrs = {5.0, 5.0};
    const auto result = noise_sweep(exp, sweep);
    CHECK(result.rows.size() == 10);
    REQUIRE(!result.warnings.empty());
  }

  SUBCASE("empty kinds leaves only the clean baseline") {
    auto sweep = cfg.sweep;
    sweep.kinds = {};
    const auto result = noise_sweep(exp, sweep);
    CHECK(result.rows.size() == 5);
  }

  SUBCASE("sweep CSV is byte-identical across reruns and thread counts") {
    const auto p1 = (dir / "s1.csv").string();
    const auto p2 = (dir / "s2.csv").string();
    write_sweep_csv(noise_sweep(exp, cfg.sweep), p1);
    auto serial = cfg.sweep;
    serial.threads = 1;
    write_sweep_csv(noise_sweep(exp, serial), p2);
    const auto t1 = slurp(p1);
    CHECK(t1 == slurp(p2));
    CHECK(t1.rfind("kind,snr_db,method,accuracy,macro_precision,macro_recall,seed\n", 0) == 0);
    CHECK(t1.find("clean,inf,") != std::string::npos);
  }

  SUBCASE("manifest records the dataset provenance") {
    const auto p = (dir / "manifest.json").string();
    write_manifest(exp.dataset, exp.config, p);
    const auto text = slurp(p);
    CHECK(text.find("\"seed\"") != std::string::npos);
    CHECK(text.find("\"split_mode\"") != std::string::npos);
    CHECK(text.find("\"L\"") != std::string::npos);
  }
}

TEST_CASE("training is deterministic end to end") {
  auto cfg = tiny_config();
  cfg.models.train.max_epochs = 4;
  const auto a = run_training(cfg);
  const auto b = run_training(cfg);
  REQUIRE(a.rnn_history.history.size() == b.rnn_history.history.size());
  for (std::size_t e = 0; e < a.rnn_history.history.size(); ++e)
    CHECK(a.rnn_history.history[e].train_loss == b.rnn_history.history[e].train_loss);
  for (std::size_t i = 0; i < a.mlp->params().size(); ++i)
    CHECK((a.mlp->params()[i].value - b.mlp->params()[i].value).cwiseAbs().maxCoeff() == 0.0);
}
