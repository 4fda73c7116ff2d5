#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ecgfuse/fusion.hpp"
#include "ecgfuse/rng.hpp"

using namespace ecgfuse;
using namespace ecgfuse::fusion;
using Eigen::VectorXd;

namespace {

VectorXd simplex(std::initializer_list<double> vals) {
  VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

VectorXd random_simplex(int m, Rng& rng) {
  VectorXd v(m);
  double s = 0;
  for (int i = 0; i < m; ++i) {
    v[i] = -std::log(1.0 - rng.uniform());  // Exp(1) -> Dirichlet(1,..,1)
    s += v[i];
  }
  return v / s;
}

}  // namespace

TEST_CASE("check_simplex accepts simplexes and rejects the rest") {
  CHECK_NOTHROW(check_simplex(simplex({0.2, 0.3, 0.5})));
  CHECK_NOTHROW(check_simplex(simplex({1.0, 0.0})));
  CHECK_THROWS_AS(check_simplex(simplex({0.6, 0.6})), BadSimplex);
  CHECK_THROWS_AS(check_simplex(simplex({1.2, -0.2})), BadSimplex);
  CHECK_THROWS_AS(check_simplex(VectorXd()), BadSimplex);
}

TEST_CASE("evidence_conflict reductions") {
  const auto p = simplex({0.5, 0.3, 0.2});
  SUBCASE("sum reduction complements the evidence") {
    const auto ec = evidence_conflict(p, 0, ConflictReduction::Sum);
    CHECK(ec.evidence == doctest::Approx(0.5));
    CHECK(ec.conflict == doctest::Approx(0.5));
    CHECK(ec.evidence + ec.conflict == doctest::Approx(1.0));
  }
  SUBCASE("product reduction multiplies the off-class masses") {
    const auto ec = evidence_conflict(p, 0, ConflictReduction::Product);
    CHECK(ec.conflict == doctest::Approx(0.3 * 0.2));
  }
  SUBCASE("max reduction takes the largest off-class mass") {
    const auto ec = evidence_conflict(p, 1, ConflictReduction::Max);
    CHECK(ec.evidence == doctest::Approx(0.3));
    CHECK(ec.conflict == doctest::Approx(0.5));
  }
}

TEST_CASE("dst_fuse worked two-class example") {
  // E = 0.8*0.6 = 0.48; C = 0.2*0.4 = 0.08; 0.48/0.92, 0.08/0.52.
  const auto d = dst_fuse(simplex({0.8, 0.2}), simplex({0.6, 0.4}));
  CHECK(d.scores[0] == doctest::Approx(0.48 / 0.92).epsilon(1e-9));
  CHECK(d.scores[1] == doctest::Approx(0.08 / 0.52).epsilon(1e-9));
  CHECK(std::abs(d.scores[0] - 0.52174) < 1e-4);
  CHECK(std::abs(d.scores[1] - 0.15385) < 1e-4);
  CHECK(d.chosen == 0);
  CHECK(d.method == Method::Dst);
}

TEST_CASE("dst_fuse closed forms") {
  SUBCASE("uniform two-class pair collapses to 1/3 each") {
    const auto d = dst_fuse(simplex({0.5, 0.5}), simplex({0.5, 0.5}));
    CHECK(d.scores[0] == doctest::Approx(1.0 / 3));
    CHECK(d.scores[1] == doctest::Approx(1.0 / 3));
    CHECK(d.chosen == 0);  // lowest index wins the tie
  }
  SUBCASE("certain agreement stays certain") {
    const auto d = dst_fuse(simplex({1.0, 0.0}), simplex({1.0, 0.0}));
    CHECK(d.scores[0] == doctest::Approx(1.0));
    CHECK(d.scores[1] == 0.0);  // 0/0 -> 0 on the dead class
  }
  SUBCASE("total conflict yields the 0/0 convention, not NaN") {
    const auto d = dst_fuse(simplex({1.0, 0.0}), simplex({0.0, 1.0}));
    CHECK(d.scores[0] == 0.0);
    CHECK(d.scores[1] == 0.0);
    CHECK(!std::isnan(d.scores[0]));
    CHECK(d.chosen == 0);
  }
}

TEST_CASE("dst_fuse randomized invariants") {
  Rng rng(101);
  for (int m : {2, 3, 5}) {
    for (int t = 0; t < 10000 / (m * m); ++t) {
      const auto p1 = random_simplex(m, rng);
      const auto p2 = random_simplex(m, rng);
      const auto d12 = dst_fuse(p1, p2);
      const auto d21 = dst_fuse(p2, p1);
      for (int y = 0; y < m; ++y) {
        CHECK(d12.scores[y] >= 0.0);
        CHECK(d12.scores[y] <= 1.0);
        // commutativity is exact: products commute in IEEE arithmetic
        CHECK(d12.scores[y] == d21.scores[y]);
      }
      CHECK(d12.chosen == d21.chosen);
    }
  }
}

TEST_CASE("dst_fuse coordinate monotonicity") {
  // Raising one view's mass on y (balancing elsewhere) never lowers p~_y.
  Rng rng(55);
  for (int t = 0; t < 500; ++t) {
    const auto p2 = random_simplex(3, rng);
    const double a = rng.uniform(0.0, 0.9);
    const double b = rng.uniform(a, 1.0);
    const auto lo = simplex({a, (1 - a) / 2, (1 - a) / 2});
    const auto hi = simplex({b, (1 - b) / 2, (1 - b) / 2});
    CHECK(dst_fuse(hi, p2).scores[0] >= dst_fuse(lo, p2).scores[0]);
  }
}

TEST_CASE("dst_fuse preserves agreed dominance") {
  // When both views rank y above z, the fused score keeps that order.
  Rng rng(77);
  for (int t = 0; t < 2000; ++t) {
    const auto p1 = random_simplex(4, rng);
    const auto p2 = random_simplex(4, rng);
    const auto d = dst_fuse(p1, p2);
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z)
        if (p1[y] > p1[z] && p2[y] > p2[z]) CHECK(d.scores[y] >= d.scores[z]);
  }
}

TEST_CASE("renormalization changes the scale, never the argmax") {
  Rng rng(31);
  for (int t = 0; t < 500; ++t) {
    const auto p1 = random_simplex(5, rng);
    const auto p2 = random_simplex(5, rng);
    const auto plain = dst_fuse(p1, p2, false);
    const auto renorm = dst_fuse(p1, p2, true);
    CHECK(renorm.renormalized);
    CHECK(renorm.chosen == plain.chosen);
    CHECK(renorm.scores.sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("dst_fuse input validation") {
  CHECK_THROWS_AS(dst_fuse(simplex({0.7, 0.3}), simplex({0.2, 0.3, 0.5})), LengthMismatch);
  CHECK_THROWS_AS(dst_fuse(simplex({0.7, 0.4}), simplex({0.5, 0.5})), BadSimplex);
  CHECK_THROWS_AS(dst_fuse(simplex({0.5, 0.5}), simplex({-0.1, 1.1})), BadSimplex);
}

TEST_CASE("score_fuse is the arithmetic mean") {
  const auto d = score_fuse(simplex({0.8, 0.2}), simplex({0.6, 0.4}));
  CHECK(d.scores[0] == doctest::Approx(0.7));
  CHECK(d.scores[1] == doctest::Approx(0.3));
  CHECK(d.chosen == 0);
  CHECK(d.method == Method::ScoreMean);
  CHECK_THROWS_AS(score_fuse(simplex({1.0}), simplex({0.5, 0.5})), LengthMismatch);
}

TEST_CASE("argmax_lowest breaks ties toward the lowest index") {
  CHECK(argmax_lowest(simplex({0.2, 0.5, 0.5})) == 1);
  CHECK(argmax_lowest(simplex({0.5, 0.5})) == 0);
  CHECK(argmax_lowest(simplex({0.0, 0.0, 0.0})) == 0);
}

TEST_CASE("conflict reduction names") {
  CHECK(conflict_reduction_from_name("sum") == ConflictReduction::Sum);
  CHECK(conflict_reduction_from_name("product") == ConflictReduction::Product);
  CHECK(conflict_reduction_from_name("max") == ConflictReduction::Max);
  CHECK_THROWS(conflict_reduction_from_name("mean"));
}

TEST_CASE("feature-level head overfits concatenated features deterministically") {
  Rng rng(9);
  std::vector<VectorXd> f1, f2;
  std::vector<int> ys;
  for (int i = 0; i < 40; ++i) {
    const int label = i % 2;
    VectorXd a(4), b(3);
    for (int d = 0; d < 4; ++d) a[d] = (label ? 1.0 : -1.0) + 0.2 * rng.uniform(-1.0, 1.0);
    for (int d = 0; d < 3; ++d) b[d] = (label ? -1.0 : 1.0) + 0.2 * rng.uniform(-1.0, 1.0);
    f1.push_back(a);
    f2.push_back(b);
    ys.push_back(label);
  }
  models::TrainConfig cfg;
  cfg.max_epochs = 100;
  cfg.patience = 0;
  cfg.val_fraction = 0.0;
  cfg.seed = 2;

  FeatureFusionHead head(4, 3, 2, 7), head2(4, 3, 2, 7);
  head.fit(f1, f2, ys, cfg);
  head2.fit(f1, f2, ys, cfg);
  int correct = 0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const auto d = head.predict(f1[i], f2[i]);
    CHECK(d.method == Method::FeatureLevel);
    CHECK(d.scores.sum() == doctest::Approx(1.0).epsilon(1e-9));
    if (d.chosen == ys[i]) ++correct;
    // same seed, same fit, same outputs
    const auto d2 = head2.predict(f1[i], f2[i]);
    CHECK((d.scores - d2.scores).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(f1.size()) >= 0.95);
}
