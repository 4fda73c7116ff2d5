#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecgfuse::models {

struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyDataset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NamedTensor {
  std::string name;
  Eigen::MatrixXd value;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Common surface for the two view classifiers. Parameters are a flat list of
// named tensors so the optimizer, checkpoints, and the finite-difference
// checker can stay model-agnostic.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Eigen::VectorXd predict(const Eigen::VectorXd& x) const = 0;

  // Cross-entropy of -log p[target]; adds analytic gradients into `grads`
  // (parallel to params()).
  virtual double loss_grad(const Eigen::VectorXd& x, int target,
                           std::vector<Eigen::MatrixXd>& grads) const = 0;

  // Last hidden layer activations (pre-softmax input).
  virtual Eigen::VectorXd features(const Eigen::VectorXd& x) const = 0;

  virtual int input_dim() const = 0;
  virtual int n_classes() const = 0;
  virtual std::string kind() const = 0;

  std::vector<NamedTensor>& params() { return params_; }
  const std::vector<NamedTensor>& params() const { return params_; }
  std::vector<Eigen::MatrixXd> zero_grads() const;

  double loss(const Eigen::VectorXd& x, int target) const;

 protected:
  std::vector<NamedTensor> params_;
  void check_input(const Eigen::VectorXd& x) const;
};

// ReLU feed-forward net with softmax output. An empty hidden list degrades to
// plain softmax regression (used by the feature-level fusion head).
class MlpClassifier : public Classifier {
 public:
  MlpClassifier(int input_dim, std::vector<int> hidden, int m, std::uint64_t seed);

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const override;
  double loss_grad(const Eigen::VectorXd& x, int target,
                   std::vector<Eigen::MatrixXd>& grads) const override;
  Eigen::VectorXd features(const Eigen::VectorXd& x) const override;
  int input_dim() const override { return input_dim_; }
  int n_classes() const override { return m_; }
  std::string kind() const override { return "mlp"; }
  const std::vector<int>& hidden() const { return hidden_; }

 private:
  struct Cache;
  void forward(const Eigen::VectorXd& x, Cache& c) const;
  int input_dim_;
  std::vector<int> hidden_;
  int m_;
};

// Single-layer bidirectional gated-recurrent net over a (strided) beat, final
// states concatenated into two ReLU dense layers and a softmax head.
class BiRnnClassifier : public Classifier {
 public:
  BiRnnClassifier(int seq_len, int hidden, std::vector<int> dense, int m, int stride,
                  std::uint64_t seed);

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const override;
  double loss_grad(const Eigen::VectorXd& x, int target,
                   std::vector<Eigen::MatrixXd>& grads) const override;
  Eigen::VectorXd features(const Eigen::VectorXd& x) const override;
  int input_dim() const override { return seq_len_; }
  int n_classes() const override { return m_; }
  std::string kind() const override { return "birnn"; }
  int stride() const { return stride_; }
  int hidden_size() const { return hidden_; }

 private:
  struct Cache;
  void forward(const Eigen::VectorXd& x, Cache& c) const;
  std::vector<double> strided(const Eigen::VectorXd& x) const;
  int seq_len_;
  int hidden_;
  std::vector<int> dense_;
  int m_;
  int stride_;
};

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int batch = 32;
  int max_epochs = 30;
  int patience = 5;           // <= 0 disables early stopping
  double val_fraction = 0.1;  // held out from the training split
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
  double val_acc = 0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = -1;
};

// Mini-batch Adam with deterministic shuffling and ordered gradient
// reduction; early stop on held-out cross-entropy, best params restored.
TrainResult train(Classifier& model, const std::vector<Eigen::VectorXd>& inputs,
                  const std::vector<int>& labels, const TrainConfig& cfg);

double accuracy(const Classifier& model, const std::vector<Eigen::VectorXd>& inputs,
                const std::vector<int>& labels);

struct GradCheckResult {
  double max_rel_error = 0;
  std::string worst_tensor;
  int coords_checked = 0;
};

// Central finite differences on >= n_coords randomly sampled coordinates.
GradCheckResult grad_check(Classifier& model, const Eigen::VectorXd& x, int target,
                           double eps = 1e-5, int n_coords = 200, std::uint64_t seed = 0);

void save_checkpoint(const Classifier& model, const std::string& path, std::uint64_t seed,
                     const std::string& config_hash);
// Restores tensor values into an already-constructed model of matching shape.
void load_checkpoint(Classifier& model, const std::string& path);

void save_history_csv(const TrainResult& result, const std::string& path);

}  // namespace ecgfuse::models
