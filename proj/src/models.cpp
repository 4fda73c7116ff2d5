#include "ecgfuse/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ecgfuse/rng.hpp"

namespace ecgfuse::models {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd init_matrix(Eigen::Index rows, Eigen::Index cols, double std_dev, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = std_dev * rng.normal();
  return m;
}

VectorXd relu(const VectorXd& v) { return v.cwiseMax(0.0); }

VectorXd sigmoid(const VectorXd& v) {
  return v.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

}  // namespace

VectorXd softmax(const VectorXd& logits) {
  const double mx = logits.maxCoeff();
  VectorXd e = (logits.array() - mx).exp();
  return e / e.sum();
}

std::vector<MatrixXd> Classifier::zero_grads() const {
  std::vector<MatrixXd> g;
  g.reserve(params_.size());
  for (const auto& p : params_) g.push_back(MatrixXd::Zero(p.value.rows(), p.value.cols()));
  return g;
}

double Classifier::loss(const VectorXd& x, int target) const {
  const VectorXd p = predict(x);
  return -std::log(std::max(p[target], 1e-300));
}

void Classifier::check_input(const VectorXd& x) const {
  if (static_cast<int>(x.size()) != input_dim())
    throw ShapeMismatch("input size " + std::to_string(x.size()) + ", expected " +
                        std::to_string(input_dim()));
}

// ---------------------------------------------------------------------------
// MLP

struct MlpClassifier::Cache {
  std::vector<VectorXd> acts;  // acts[0] = input, then each hidden, then probs
  VectorXd logits;
  VectorXd probs;
};

MlpClassifier::MlpClassifier(int input_dim, std::vector<int> hidden, int m, std::uint64_t seed)
    : input_dim_(input_dim), hidden_(std::move(hidden)), m_(m) {
  Rng rng(seed);
  int in = input_dim_;
  for (std::size_t i = 0; i < hidden_.size(); ++i) {
    const int out = hidden_[i];
    const std::string tag = "hidden" + std::to_string(i + 1);
    params_.push_back({tag + ".W", init_matrix(out, in, std::sqrt(2.0 / in), rng)});
    params_.push_back({tag + ".b", MatrixXd::Zero(out, 1)});
    in = out;
  }
  params_.push_back({"out.W", init_matrix(m_, in, std::sqrt(1.0 / in), rng)});
  params_.push_back({"out.b", MatrixXd::Zero(m_, 1)});
}

void MlpClassifier::forward(const VectorXd& x, Cache& c) const {
  check_input(x);
  c.acts.clear();
  c.acts.push_back(x);
  VectorXd a = x;
  for (std::size_t i = 0; i < hidden_.size(); ++i) {
    const MatrixXd& w = params_[2 * i].value;
    const VectorXd b = params_[2 * i + 1].value.col(0);
    a = relu(w * a + b);
    c.acts.push_back(a);
  }
  const MatrixXd& wo = params_[params_.size() - 2].value;
  const VectorXd bo = params_.back().value.col(0);
  c.logits = wo * a + bo;
  c.probs = softmax(c.logits);
}

VectorXd MlpClassifier::predict(const VectorXd& x) const {
  Cache c;
  forward(x, c);
  return c.probs;
}

VectorXd MlpClassifier::features(const VectorXd& x) const {
  Cache c;
  forward(x, c);
  return c.acts.back();
}

double MlpClassifier::loss_grad(const VectorXd& x, int target,
                                std::vector<MatrixXd>& grads) const {
  if (grads.size() != params_.size()) throw ShapeMismatch("gradient list size mismatch");
  Cache c;
  forward(x, c);
  const double loss_val = -std::log(std::max(c.probs[target], 1e-300));

  VectorXd d = c.probs;  // softmax-CE: dL/dlogit = p - onehot
  d[target] -= 1.0;
  const std::size_t no = params_.size() - 2;
  grads[no] += d * c.acts.back().transpose();
  grads[no + 1].col(0) += d;
  VectorXd da = params_[no].value.transpose() * d;
  for (std::size_t i = hidden_.size(); i-- > 0;) {
    // ReLU mask from the stored activation
    VectorXd dz = da.array() * (c.acts[i + 1].array() > 0.0).cast<double>();
    grads[2 * i] += dz * c.acts[i].transpose();
    grads[2 * i + 1].col(0) += dz;
    da = params_[2 * i].value.transpose() * dz;
  }
  return loss_val;
}

// ---------------------------------------------------------------------------
// Bidirectional gated-recurrent net

namespace {
// Per-direction parameter block offsets within params_.
constexpr int kWz = 0, kUz = 1, kBz = 2, kWr = 3, kUr = 4, kBr = 5, kWc = 6, kUc = 7, kBc = 8;
constexpr int kPerDir = 9;

struct DirCache {
  std::vector<double> x;         // strided inputs in traversal order
  std::vector<VectorXd> h;       // h[0] = 0, h[t+1] after step t
  std::vector<VectorXd> z, r, c;
};
}  // namespace

struct BiRnnClassifier::Cache {
  DirCache fwd, bwd;
  std::vector<VectorXd> acts;  // dense activations, acts[0] = concat state
  VectorXd logits;
  VectorXd probs;
};

BiRnnClassifier::BiRnnClassifier(int seq_len, int hidden, std::vector<int> dense, int m,
                                 int stride, std::uint64_t seed)
    : seq_len_(seq_len), hidden_(hidden), dense_(std::move(dense)), m_(m), stride_(stride) {
  if (stride_ < 1) throw std::invalid_argument("stride must be >= 1");
  Rng rng(seed);
  const double ws = std::sqrt(1.0 / 1.0);       // scalar input
  const double us = std::sqrt(1.0 / hidden_);
  for (const char* dir : {"fwd", "bwd"}) {
    for (const char* gate : {"z", "r", "c"}) {
      const std::string base = std::string(dir) + ".";
      params_.push_back({base + "W" + gate, init_matrix(hidden_, 1, ws, rng)});
      params_.push_back({base + "U" + gate, init_matrix(hidden_, hidden_, us, rng)});
      params_.push_back({base + "b" + gate, MatrixXd::Zero(hidden_, 1)});
    }
  }
  int in = 2 * hidden_;
  for (std::size_t i = 0; i < dense_.size(); ++i) {
    const std::string tag = "dense" + std::to_string(i + 1);
    params_.push_back({tag + ".W", init_matrix(dense_[i], in, std::sqrt(2.0 / in), rng)});
    params_.push_back({tag + ".b", MatrixXd::Zero(dense_[i], 1)});
    in = dense_[i];
  }
  params_.push_back({"out.W", init_matrix(m_, in, std::sqrt(1.0 / in), rng)});
  params_.push_back({"out.b", MatrixXd::Zero(m_, 1)});
}

std::vector<double> BiRnnClassifier::strided(const VectorXd& x) const {
  std::vector<double> out;
  for (int i = 0; i < seq_len_; i += stride_) out.push_back(x[i]);
  return out;
}

namespace {

// One direction of the recurrent pass; params base points at the Wz tensor.
void run_direction(const std::vector<NamedTensor>& params, int base,
                   const std::vector<double>& xs, int hidden, DirCache& cache) {
  const MatrixXd& wz = params[static_cast<std::size_t>(base + kWz)].value;
  const MatrixXd& uz = params[static_cast<std::size_t>(base + kUz)].value;
  const VectorXd bz = params[static_cast<std::size_t>(base + kBz)].value.col(0);
  const MatrixXd& wr = params[static_cast<std::size_t>(base + kWr)].value;
  const MatrixXd& ur = params[static_cast<std::size_t>(base + kUr)].value;
  const VectorXd br = params[static_cast<std::size_t>(base + kBr)].value.col(0);
  const MatrixXd& wc = params[static_cast<std::size_t>(base + kWc)].value;
  const MatrixXd& uc = params[static_cast<std::size_t>(base + kUc)].value;
  const VectorXd bc = params[static_cast<std::size_t>(base + kBc)].value.col(0);

  cache.x = xs;
  cache.h.assign(1, VectorXd::Zero(hidden));
  cache.z.clear();
  cache.r.clear();
  cache.c.clear();
  for (double xt : xs) {
    const VectorXd& hp = cache.h.back();
    VectorXd z = sigmoid(wz.col(0) * xt + uz * hp + bz);
    VectorXd r = sigmoid(wr.col(0) * xt + ur * hp + br);
    VectorXd c = (wc.col(0) * xt + uc * r.cwiseProduct(hp) + bc)
                     .unaryExpr([](double v) { return std::tanh(v); });
    VectorXd h = (VectorXd::Ones(hidden) - z).cwiseProduct(hp) + z.cwiseProduct(c);
    cache.z.push_back(std::move(z));
    cache.r.push_back(std::move(r));
    cache.c.push_back(std::move(c));
    cache.h.push_back(std::move(h));
  }
}

// Backpropagation through time, gradient arriving only at the final state.
void backprop_direction(const std::vector<NamedTensor>& params, int base, int hidden,
                        const DirCache& cache, VectorXd dh,
                        std::vector<MatrixXd>& grads) {
  const MatrixXd& uz = params[static_cast<std::size_t>(base + kUz)].value;
  const MatrixXd& ur = params[static_cast<std::size_t>(base + kUr)].value;
  const MatrixXd& uc = params[static_cast<std::size_t>(base + kUc)].value;
  for (std::size_t t = cache.x.size(); t-- > 0;) {
    const double xt = cache.x[t];
    const VectorXd& hp = cache.h[t];
    const VectorXd& z = cache.z[t];
    const VectorXd& r = cache.r[t];
    const VectorXd& c = cache.c[t];

    VectorXd dz = dh.cwiseProduct(c - hp).cwiseProduct(z.cwiseProduct(VectorXd::Ones(hidden) - z));
    VectorXd dc = dh.cwiseProduct(z).cwiseProduct(
        (VectorXd::Ones(hidden) - c.cwiseProduct(c)));
    VectorXd drh = uc.transpose() * dc;  // gradient at r .* h_prev
    VectorXd dr = drh.cwiseProduct(hp).cwiseProduct(r.cwiseProduct(VectorXd::Ones(hidden) - r));

    grads[static_cast<std::size_t>(base + kWz)].col(0) += dz * xt;
    grads[static_cast<std::size_t>(base + kUz)] += dz * hp.transpose();
    grads[static_cast<std::size_t>(base + kBz)].col(0) += dz;
    grads[static_cast<std::size_t>(base + kWr)].col(0) += dr * xt;
    grads[static_cast<std::size_t>(base + kUr)] += dr * hp.transpose();
    grads[static_cast<std::size_t>(base + kBr)].col(0) += dr;
    grads[static_cast<std::size_t>(base + kWc)].col(0) += dc * xt;
    grads[static_cast<std::size_t>(base + kUc)] += dc * r.cwiseProduct(hp).transpose();
    grads[static_cast<std::size_t>(base + kBc)].col(0) += dc;

    dh = dh.cwiseProduct(VectorXd::Ones(hidden) - z) + drh.cwiseProduct(r) +
         uz.transpose() * dz + ur.transpose() * dr;
  }
}

}  // namespace

void BiRnnClassifier::forward(const VectorXd& x, Cache& cache) const {
  check_input(x);
  auto xs = strided(x);
  auto rev = xs;
  std::reverse(rev.begin(), rev.end());
  run_direction(params_, 0, xs, hidden_, cache.fwd);
  run_direction(params_, kPerDir, rev, hidden_, cache.bwd);

  VectorXd state(2 * hidden_);
  state << cache.fwd.h.back(), cache.bwd.h.back();
  cache.acts.clear();
  cache.acts.push_back(state);
  const std::size_t dense_base = 2 * kPerDir;
  VectorXd a = state;
  for (std::size_t i = 0; i < dense_.size(); ++i) {
    const MatrixXd& w = params_[dense_base + 2 * i].value;
    const VectorXd b = params_[dense_base + 2 * i + 1].value.col(0);
    a = relu(w * a + b);
    cache.acts.push_back(a);
  }
  const MatrixXd& wo = params_[params_.size() - 2].value;
  const VectorXd bo = params_.back().value.col(0);
  cache.logits = wo * a + bo;
  cache.probs = softmax(cache.logits);
}

VectorXd BiRnnClassifier::predict(const VectorXd& x) const {
  Cache c;
  forward(x, c);
  return c.probs;
}

VectorXd BiRnnClassifier::features(const VectorXd& x) const {
  Cache c;
  forward(x, c);
  return c.acts.back();
}

double BiRnnClassifier::loss_grad(const VectorXd& x, int target,
                                  std::vector<MatrixXd>& grads) const {
  if (grads.size() != params_.size()) throw ShapeMismatch("gradient list size mismatch");
  Cache cache;
  forward(x, cache);
  const double loss_val = -std::log(std::max(cache.probs[target], 1e-300));

  VectorXd d = cache.probs;
  d[target] -= 1.0;
  const std::size_t no = params_.size() - 2;
  grads[no] += d * cache.acts.back().transpose();
  grads[no + 1].col(0) += d;
  VectorXd da = params_[no].value.transpose() * d;
  const std::size_t dense_base = 2 * kPerDir;
  for (std::size_t i = dense_.size(); i-- > 0;) {
    VectorXd dz = da.array() * (cache.acts[i + 1].array() > 0.0).cast<double>();
    grads[dense_base + 2 * i] += dz * cache.acts[i].transpose();
    grads[dense_base + 2 * i + 1].col(0) += dz;
    da = params_[dense_base + 2 * i].value.transpose() * dz;
  }
  backprop_direction(params_, 0, hidden_, cache.fwd, da.head(hidden_), grads);
  backprop_direction(params_, kPerDir, hidden_, cache.bwd, da.tail(hidden_), grads);
  return loss_val;
}

// ---------------------------------------------------------------------------
// Training

namespace {

class Adam {
 public:
  Adam(const std::vector<NamedTensor>& params, const TrainConfig& cfg) : cfg_(cfg) {
    for (const auto& p : params) {
      m_.push_back(MatrixXd::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(MatrixXd::Zero(p.value.rows(), p.value.cols()));
    }
  }

  void step(std::vector<NamedTensor>& params, const std::vector<MatrixXd>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
      v_[i] = cfg_.beta2 * v_[i].array() + (1.0 - cfg_.beta2) * grads[i].array().square();
      const auto mhat = m_[i].array() / bc1;
      const auto vhat = v_[i].array() / bc2;
      params[i].value.array() -= cfg_.lr * mhat / (vhat.sqrt() + cfg_.eps);
    }
  }

 private:
  TrainConfig cfg_;
  std::vector<MatrixXd> m_, v_;
  int t_ = 0;
};

}  // namespace

TrainResult train(Classifier& model, const std::vector<VectorXd>& inputs,
                  const std::vector<int>& labels, const TrainConfig& cfg) {
  if (inputs.empty()) throw EmptyDataset("training set is empty");
  if (inputs.size() != labels.size()) throw ShapeMismatch("inputs/labels size mismatch");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const auto n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(order.size()));
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> fit(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  if (fit.empty()) throw EmptyDataset("no samples left after validation holdout");
  const bool early_stop = cfg.patience > 0 && !val.empty();

  Adam adam(model.params(), cfg);
  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<NamedTensor> best_params;
  int bad_epochs = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(fit);
    double loss_sum = 0;
    for (std::size_t start = 0; start < fit.size(); start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t end = std::min(fit.size(), start + static_cast<std::size_t>(cfg.batch));
      auto grads = model.zero_grads();
      for (std::size_t i = start; i < end; ++i)
        loss_sum += model.loss_grad(inputs[fit[i]], labels[fit[i]], grads);
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grads) g *= inv;
      adam.step(model.params(), grads);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(fit.size());
    if (!val.empty()) {
      double vl = 0;
      int correct = 0;
      for (std::size_t i : val) {
        const VectorXd p = model.predict(inputs[i]);
        vl += -std::log(std::max(p[labels[i]], 1e-300));
        Eigen::Index arg;
        p.maxCoeff(&arg);
        if (static_cast<int>(arg) == labels[i]) ++correct;
      }
      stats.val_loss = vl / static_cast<double>(val.size());
      stats.val_acc = static_cast<double>(correct) / static_cast<double>(val.size());
    } else {
      stats.val_loss = stats.train_loss;
      stats.val_acc = 0;
    }
    result.history.push_back(stats);

    if (early_stop) {
      if (stats.val_loss < best_val - 1e-12) {
        best_val = stats.val_loss;
        best_params = model.params();
        result.best_epoch = epoch;
        bad_epochs = 0;
      } else if (++bad_epochs >= cfg.patience) {
        break;
      }
    } else {
      result.best_epoch = epoch;
    }
  }
  if (early_stop && !best_params.empty()) model.params() = best_params;
  return result;
}

double accuracy(const Classifier& model, const std::vector<VectorXd>& inputs,
                const std::vector<int>& labels) {
  int correct = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const VectorXd p = model.predict(inputs[i]);
    Eigen::Index arg;
    p.maxCoeff(&arg);
    if (static_cast<int>(arg) == labels[i]) ++correct;
  }
  return inputs.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(inputs.size());
}

GradCheckResult grad_check(Classifier& model, const VectorXd& x, int target, double eps,
                           int n_coords, std::uint64_t seed) {
  auto grads = model.zero_grads();
  model.loss_grad(x, target, grads);

  std::size_t total = 0;
  for (const auto& p : model.params()) total += static_cast<std::size_t>(p.value.size());

  Rng rng(seed);
  GradCheckResult res;
  for (int k = 0; k < n_coords; ++k) {
    std::size_t flat = static_cast<std::size_t>(rng.uniform_int(total));
    std::size_t ti = 0;
    while (flat >= static_cast<std::size_t>(model.params()[ti].value.size())) {
      flat -= static_cast<std::size_t>(model.params()[ti].value.size());
      ++ti;
    }
    double& coeff = model.params()[ti].value.data()[flat];
    const double orig = coeff;
    coeff = orig + eps;
    const double lp = model.loss(x, target);
    coeff = orig - eps;
    const double lm = model.loss(x, target);
    coeff = orig;
    const double numeric = (lp - lm) / (2.0 * eps);
    const double analytic = grads[ti].data()[flat];
    const double rel = std::abs(analytic - numeric) /
                       std::max({std::abs(analytic), std::abs(numeric), 1e-12});
    if (rel > res.max_rel_error) {
      res.max_rel_error = rel;
      res.worst_tensor = model.params()[ti].name;
    }
    ++res.coords_checked;
  }
  return res;
}

void save_checkpoint(const Classifier& model, const std::string& path, std::uint64_t seed,
                     const std::string& config_hash) {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = model.kind();
  j["input_dim"] = model.input_dim();
  j["n_classes"] = model.n_classes();
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& p : model.params()) {
    nlohmann::json t;
    t["rows"] = p.value.rows();
    t["cols"] = p.value.cols();
    std::vector<double> data(p.value.data(), p.value.data() + p.value.size());
    t["data"] = data;
    tensors[p.name] = t;
  }
  j["tensors"] = tensors;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump(2) << '\n';
}

void load_checkpoint(Classifier& model, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  if (j.at("kind").get<std::string>() != model.kind())
    throw ShapeMismatch("checkpoint kind '" + j.at("kind").get<std::string>() +
                        "' does not match model '" + model.kind() + "'");
  for (auto& p : model.params()) {
    const auto& t = j.at("tensors").at(p.name);
    if (t.at("rows").get<Eigen::Index>() != p.value.rows() ||
        t.at("cols").get<Eigen::Index>() != p.value.cols())
      throw ShapeMismatch("checkpoint tensor shape mismatch for " + p.name);
    const auto data = t.at("data").get<std::vector<double>>();
    std::copy(data.begin(), data.end(), p.value.data());
  }
}

void save_history_csv(const TrainResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write history: " + path);
  out << "epoch,train_loss,val_loss,val_acc\n";
  out.precision(9);
  for (const auto& s : result.history)
    out << s.epoch << ',' << s.train_loss << ',' << s.val_loss << ',' << s.val_acc << '\n';
}

}  // namespace ecgfuse::models
