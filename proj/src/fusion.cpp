#include "ecgfuse/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace ecgfuse::fusion {

const char* method_name(Method m) {
  switch (m) {
    case Method::Dst: return "dst";
    case Method::ScoreMean: return "score";
    case Method::FeatureLevel: return "feature";
  }
  return "?";
}

ConflictReduction conflict_reduction_from_name(const std::string& name) {
  if (name == "sum") return ConflictReduction::Sum;
  if (name == "product") return ConflictReduction::Product;
  if (name == "max") return ConflictReduction::Max;
  throw std::invalid_argument("unknown conflict reduction: " + name);
}

void check_simplex(const Eigen::VectorXd& p) {
  if (p.size() == 0) throw BadSimplex("empty probability vector");
  double sum = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < 0 || !std::isfinite(p[i]))
      throw BadSimplex("probability " + std::to_string(p[i]) + " at index " + std::to_string(i));
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw BadSimplex("probabilities sum to " + std::to_string(sum));
}

EvidencePair evidence_conflict(const Eigen::VectorXd& p, int y, ConflictReduction reduction) {
  check_simplex(p);
  if (y < 0 || y >= static_cast<int>(p.size())) throw std::out_of_range("class index");
  EvidencePair e;
  e.evidence = p[y];
  switch (reduction) {
    case ConflictReduction::Sum:
      e.conflict = 1.0 - p[y];
      break;
    case ConflictReduction::Product: {
      double prod = 1.0;
      for (Eigen::Index j = 0; j < p.size(); ++j)
        if (static_cast<int>(j) != y) prod *= p[j];
      e.conflict = prod;
      break;
    }
    case ConflictReduction::Max: {
      double mx = 0.0;
      for (Eigen::Index j = 0; j < p.size(); ++j)
        if (static_cast<int>(j) != y) mx = std::max(mx, p[j]);
      e.conflict = mx;
      break;
    }
  }
  return e;
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

FusedDecision dst_fuse(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2, bool renormalize,
                       ConflictReduction reduction) {
  if (p1.size() != p2.size())
    throw LengthMismatch("simplex lengths " + std::to_string(p1.size()) + " vs " +
                         std::to_string(p2.size()));
  check_simplex(p1);
  check_simplex(p2);
  FusedDecision d;
  d.method = Method::Dst;
  d.scores.resize(p1.size());
  for (Eigen::Index y = 0; y < p1.size(); ++y) {
    const auto e1 = evidence_conflict(p1, static_cast<int>(y), reduction);
    const auto e2 = evidence_conflict(p2, static_cast<int>(y), reduction);
    const double num = e1.evidence * e2.evidence;
    const double den = 1.0 - e1.conflict * e2.conflict;
    d.scores[y] = den > 0.0 ? num / den : 0.0;  // 0/0 when both views rule y out
  }
  d.chosen = argmax_lowest(d.scores);
  if (renormalize) {
    const double sum = d.scores.sum();
    if (sum > 0.0) d.scores /= sum;
    d.renormalized = true;
  }
  return d;
}

FusedDecision score_fuse(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2) {
  if (p1.size() != p2.size())
    throw LengthMismatch("simplex lengths " + std::to_string(p1.size()) + " vs " +
                         std::to_string(p2.size()));
  check_simplex(p1);
  check_simplex(p2);
  FusedDecision d;
  d.method = Method::ScoreMean;
  d.scores = 0.5 * (p1 + p2);
  d.chosen = argmax_lowest(d.scores);
  return d;
}

FeatureFusionHead::FeatureFusionHead(int dim1, int dim2, int m, std::uint64_t seed)
    : dim1_(dim1), dim2_(dim2), head_(dim1 + dim2, {}, m, seed) {}

Eigen::VectorXd FeatureFusionHead::concat(const Eigen::VectorXd& f1,
                                          const Eigen::VectorXd& f2) const {
  if (static_cast<int>(f1.size()) != dim1_ || static_cast<int>(f2.size()) != dim2_)
    throw LengthMismatch("feature dims " + std::to_string(f1.size()) + "+" +
                         std::to_string(f2.size()) + ", expected " + std::to_string(dim1_) +
                         "+" + std::to_string(dim2_));
  Eigen::VectorXd f(dim1_ + dim2_);
  f << f1, f2;
  return f;
}

models::TrainResult FeatureFusionHead::fit(const std::vector<Eigen::VectorXd>& features1,
                                           const std::vector<Eigen::VectorXd>& features2,
                                           const std::vector<int>& labels,
                                           const models::TrainConfig& cfg) {
  if (features1.size() != features2.size() || features1.size() != labels.size())
    throw LengthMismatch("feature/label list sizes differ");
  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(features1.size());
  for (std::size_t i = 0; i < features1.size(); ++i)
    inputs.push_back(concat(features1[i], features2[i]));
  return models::train(head_, inputs, labels, cfg);
}

FusedDecision FeatureFusionHead::predict(const Eigen::VectorXd& f1,
                                         const Eigen::VectorXd& f2) const {
  FusedDecision d;
  d.method = Method::FeatureLevel;
  d.scores = head_.predict(concat(f1, f2));
  d.chosen = argmax_lowest(d.scores);
  return d;
}

}  // namespace ecgfuse::fusion
