#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ecgfuse/beats.hpp"
#include "ecgfuse/rng.hpp"
#include "ecgfuse/synthetic.hpp"

using namespace ecgfuse;
using namespace ecgfuse::beats;

namespace {

wfdb::Annotation beat_at(std::int64_t idx, char sym = 'N') {
  wfdb::Annotation a;
  a.sample_index = idx;
  a.symbol = sym;
  return a;
}

}  // namespace

TEST_CASE("segment_beats window boundaries at 360 Hz") {
  // pre 250 ms = 90 samples, post 400 ms = 144 samples
  std::vector<double> sig(1000, 0.0);
  SegmentParams p;

  SUBCASE("annotation at exactly pre-window start is kept") {
    const auto b = segment_beats(sig, 360.0, {beat_at(90)}, "r", p);
    REQUIRE(b.size() == 1);
    CHECK(static_cast<int>(b[0].samples.size()) == 187);
    CHECK(b[0].r_peak == 90);
  }
  SUBCASE("annotation with pre-window underflow is dropped") {
    CHECK(segment_beats(sig, 360.0, {beat_at(50)}, "r", p).empty());
  }
  SUBCASE("annotation with post-window overflow is dropped") {
    CHECK(segment_beats(sig, 360.0, {beat_at(900)}, "r", p).empty());
    CHECK(segment_beats(sig, 360.0, {beat_at(856)}, "r", p).size() == 1);  // 856+144 == 1000
  }
  SUBCASE("non-beat annotations never become beats") {
    CHECK(segment_beats(sig, 360.0, {beat_at(500, '+')}, "r", p).empty());
  }
  SUBCASE("empty record") {
    CHECK_THROWS_AS(segment_beats({}, 360.0, {beat_at(90)}, "r", p), EmptyRecord);
  }
}

TEST_CASE("segmentation resampling preserves constants and ramps") {
  SegmentParams p;
  SUBCASE("constant signal") {
    std::vector<double> sig(1000, 3.25);
    const auto b = segment_beats(sig, 360.0, {beat_at(500)}, "r", p);
    REQUIRE(b.size() == 1);
    for (double v : b[0].samples) CHECK(v == doctest::Approx(3.25));
  }
  SUBCASE("linear ramp keeps endpoints") {
    std::vector<double> sig(1000);
    for (std::size_t i = 0; i < sig.size(); ++i) sig[i] = 0.5 * static_cast<double>(i);
    const auto b = segment_beats(sig, 360.0, {beat_at(500)}, "r", p);
    REQUIRE(b.size() == 1);
    const auto& s = b[0].samples;
    CHECK(s.front() == doctest::Approx(sig[410]));       // 500 - 90
    CHECK(s.back() == doctest::Approx(sig[643]));        // 500 + 144 - 1
    // interior points stay on the line
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      const double expect = s.front() + (s.back() - s.front()) * static_cast<double>(i) /
                                            static_cast<double>(s.size() - 1);
      CHECK(s[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("minmax_normalize") {
  CHECK(minmax_normalize({-1, 0, 1}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(minmax_normalize({5, 5, 5}) == std::vector<double>{0.5, 0.5, 0.5});

  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(64);
    for (auto& x : v) x = rng.normal();
    const auto n = minmax_normalize(v);
    CHECK(*std::min_element(n.begin(), n.end()) == doctest::Approx(0.0));
    CHECK(*std::max_element(n.begin(), n.end()) == doctest::Approx(1.0));
    // idempotence
    const auto n2 = minmax_normalize(n);
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(n2[i] == doctest::Approx(n[i]));
  }
}

namespace {
std::vector<Beat> labeled_beats(const std::vector<std::size_t>& counts) {
  return synthetic::make_beats(counts, 32, 99);
}
}  // namespace

TEST_CASE("stratified_split per-class counts") {
  auto ds = stratified_split(labeled_beats({10, 0, 10, 0, 0}), 5, 0.8, 1);
  const auto train = ds.class_counts(Split::Train);
  const auto test = ds.class_counts(Split::Test);
  CHECK(train[0] == 8);
  CHECK(test[0] == 2);
  CHECK(train[2] == 8);
  CHECK(test[2] == 2);

  SUBCASE("same seed gives an identical split") {
    auto ds2 = stratified_split(labeled_beats({10, 0, 10, 0, 0}), 5, 0.8, 1);
    CHECK(ds.split == ds2.split);
  }
  SUBCASE("degenerate ratios rejected") {
    CHECK_THROWS_AS(stratified_split(labeled_beats({10}), 1, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(stratified_split(labeled_beats({10}), 1, 0.0, 1), std::invalid_argument);
  }
}

TEST_CASE("smote balances counts and interpolates on segments") {
  const auto beats = labeled_beats({100, 10, 0, 0, 0});
  const auto res = smote(beats, 5, 5, 77);
  CHECK(res.warnings.empty());

  std::vector<std::size_t> counts(5, 0);
  for (const auto& b : res.beats) ++counts[static_cast<std::size_t>(b.label)];
  CHECK(counts[0] == 100);
  CHECK(counts[1] == 100);

  // originals pass through unchanged, in order
  REQUIRE(res.beats.size() >= beats.size());
  for (std::size_t i = 0; i < beats.size(); ++i)
    CHECK(res.beats[i].samples == beats[i].samples);

  // every synthetic point is collinear with two originals of its class
  std::vector<const Beat*> originals;
  for (const auto& b : beats)
    if (b.label == 1) originals.push_back(&b);
  for (std::size_t i = beats.size(); i < res.beats.size(); ++i) {
    const auto& s = res.beats[i];
    CHECK(s.label == 1);
    double best = 1e300;
    for (const Beat* a : originals)
      for (const Beat* b : originals) {
        if (a == b) continue;
        // residual of s - a against b - a after projecting out the segment direction
        double dot = 0, nn = 0;
        for (std::size_t k = 0; k < s.samples.size(); ++k) {
          const double d = b->samples[k] - a->samples[k];
          dot += (s.samples[k] - a->samples[k]) * d;
          nn += d * d;
        }
        const double u = nn > 0 ? dot / nn : 0;
        if (u < -1e-9 || u > 1.0 + 1e-9) continue;
        double resid = 0;
        for (std::size_t k = 0; k < s.samples.size(); ++k) {
          const double e = s.samples[k] - a->samples[k] - u * (b->samples[k] - a->samples[k]);
          resid += e * e;
        }
        best = std::min(best, std::sqrt(resid));
      }
    CHECK(best < 1e-9);
  }
}

TEST_CASE("smote endpoint and singleton behavior") {
  SUBCASE("singleton class duplicates verbatim with a warning") {
    auto beats = labeled_beats({5, 0, 0, 0, 0});
    Beat lone = beats[0];
    lone.label = 1;
    beats.push_back(lone);
    const auto res = smote(beats, 5, 5, 1);
    REQUIRE(res.warnings.size() == 1);
    std::size_t ones = 0;
    for (const auto& b : res.beats)
      if (b.label == 1) {
        ++ones;
        CHECK(b.samples == lone.samples);
      }
    CHECK(ones == 5);
  }
  SUBCASE("deterministic per seed") {
    const auto beats = labeled_beats({40, 10, 0, 0, 0});
    const auto a = smote(beats, 5, 5, 123);
    const auto b = smote(beats, 5, 5, 123);
    REQUIRE(a.beats.size() == b.beats.size());
    for (std::size_t i = 0; i < a.beats.size(); ++i) CHECK(a.beats[i].samples == b.beats[i].samples);
    const auto c = smote(beats, 5, 5, 124);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.beats.size() && !any_diff; ++i)
      any_diff = a.beats[i].samples != c.beats[i].samples;
    CHECK(any_diff);
  }
}

TEST_CASE("make_dataset leaves the test split untouched by SMOTE") {
  const auto beats = labeled_beats({60, 20, 20, 10, 10});
  const auto plain = stratified_split(beats, 5, 0.8, 9);
  const auto balanced = make_dataset(beats, 5, 0.8, 5, 9, true);

  std::vector<std::vector<double>> plain_test, balanced_test;
  for (std::size_t i = 0; i < plain.beats.size(); ++i)
    if (plain.split[i] == Split::Test) plain_test.push_back(plain.beats[i].samples);
  for (std::size_t i = 0; i < balanced.beats.size(); ++i)
    if (balanced.split[i] == Split::Test) balanced_test.push_back(balanced.beats[i].samples);
  CHECK(plain_test == balanced_test);

  const auto counts = balanced.class_counts(Split::Train);
  for (std::size_t c = 1; c < counts.size(); ++c) CHECK(counts[c] == counts[0]);

  // every beat has the same length
  for (const auto& b : balanced.beats) CHECK(b.samples.size() == balanced.beats[0].samples.size());
}
