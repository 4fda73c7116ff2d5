#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecgfuse/models.hpp"

namespace ecgfuse::fusion {

struct BadSimplex : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Method { Dst, ScoreMean, FeatureLevel };
const char* method_name(Method m);

// How the per-class conflict set collapses to a scalar. Sum is the only
// choice under which E + C = 1 and the combination rule is well defined;
// the others exist for sensitivity checks.
enum class ConflictReduction { Sum, Product, Max };
ConflictReduction conflict_reduction_from_name(const std::string& name);

struct EvidencePair {
  double evidence = 0;  // probability mass on class y
  double conflict = 0;  // mass on every other class, reduced to a scalar
};

struct FusedDecision {
  Eigen::VectorXd scores;  // fused per-class values; not generally a simplex
  int chosen = 0;          // argmax, lowest index on ties
  Method method = Method::Dst;
  bool renormalized = false;
};

// Throws BadSimplex when entries are negative or the sum strays from 1 by
// more than 1e-6.
void check_simplex(const Eigen::VectorXd& p);

EvidencePair evidence_conflict(const Eigen::VectorXd& p, int y,
                               ConflictReduction reduction = ConflictReduction::Sum);

int argmax_lowest(const Eigen::VectorXd& v);

// Per-class combination p~_y = E1 E2 / (1 - C1 C2), with 0/0 defined as 0.
FusedDecision dst_fuse(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                       bool renormalize = false,
                       ConflictReduction reduction = ConflictReduction::Sum);

// Arithmetic mean of the two simplexes.
FusedDecision score_fuse(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2);

// Feature-level baseline: softmax regression on concatenated penultimate
// features from the two view models.
class FeatureFusionHead {
 public:
  FeatureFusionHead(int dim1, int dim2, int m, std::uint64_t seed);

  models::TrainResult fit(const std::vector<Eigen::VectorXd>& features1,
                          const std::vector<Eigen::VectorXd>& features2,
                          const std::vector<int>& labels, const models::TrainConfig& cfg);

  FusedDecision predict(const Eigen::VectorXd& f1, const Eigen::VectorXd& f2) const;

  models::Classifier& classifier() { return head_; }

 private:
  Eigen::VectorXd concat(const Eigen::VectorXd& f1, const Eigen::VectorXd& f2) const;
  int dim1_, dim2_;
  models::MlpClassifier head_;
};

}  // namespace ecgfuse::fusion
