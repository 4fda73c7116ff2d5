#pragma once

#include <stdexcept>
#include <vector>

namespace ecgfuse::metrics {

struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LabelOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Averaging { Macro, Weighted };

struct Metrics {
  std::vector<std::vector<long>> confusion;  // rows = true class, cols = predicted
  double accuracy = 0;
  double macro_precision = 0;
  double macro_recall = 0;
  std::vector<double> precision;  // per class; 0 when the predicted column is empty
  std::vector<double> recall;     // per class; 0 when the true row is empty
};

// Confusion-matrix metrics. Macro averages run over classes present in the
// truths only; weighted averaging weights by true-class frequency.
Metrics compute_metrics(const std::vector<int>& truths, const std::vector<int>& predictions,
                        int m, Averaging avg = Averaging::Macro);

}  // namespace ecgfuse::metrics
