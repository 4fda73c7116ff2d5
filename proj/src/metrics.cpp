#include "ecgfuse/metrics.hpp"

#include <string>

namespace ecgfuse::metrics {

Metrics compute_metrics(const std::vector<int>& truths, const std::vector<int>& predictions,
                        int m, Averaging avg) {
  if (truths.size() != predictions.size())
    throw LengthMismatch("truths " + std::to_string(truths.size()) + " vs predictions " +
                         std::to_string(predictions.size()));
  Metrics out;
  out.confusion.assign(static_cast<std::size_t>(m), std::vector<long>(static_cast<std::size_t>(m), 0));
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int t = truths[i], p = predictions[i];
    if (t < 0 || t >= m || p < 0 || p >= m)
      throw LabelOutOfRange("label pair (" + std::to_string(t) + ", " + std::to_string(p) +
                            ") at index " + std::to_string(i));
    ++out.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }

  long total = static_cast<long>(truths.size());
  long trace = 0;
  out.precision.assign(static_cast<std::size_t>(m), 0.0);
  out.recall.assign(static_cast<std::size_t>(m), 0.0);
  std::vector<long> row_sum(static_cast<std::size_t>(m), 0), col_sum(static_cast<std::size_t>(m), 0);
  for (int t = 0; t < m; ++t)
    for (int p = 0; p < m; ++p) {
      const long v = out.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
      row_sum[static_cast<std::size_t>(t)] += v;
      col_sum[static_cast<std::size_t>(p)] += v;
      if (t == p) trace += v;
    }
  out.accuracy = total > 0 ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;

  double psum = 0, rsum = 0, wsum = 0;
  int present = 0;
  for (int c = 0; c < m; ++c) {
    const auto uc = static_cast<std::size_t>(c);
    const long tp = out.confusion[uc][uc];
    out.precision[uc] = col_sum[uc] > 0 ? static_cast<double>(tp) / static_cast<double>(col_sum[uc]) : 0.0;
    out.recall[uc] = row_sum[uc] > 0 ? static_cast<double>(tp) / static_cast<double>(row_sum[uc]) : 0.0;
    if (row_sum[uc] > 0) {
      ++present;
      const double w = avg == Averaging::Macro ? 1.0 : static_cast<double>(row_sum[uc]);
      psum += w * out.precision[uc];
      rsum += w * out.recall[uc];
      wsum += w;
    }
  }
  if (present > 0) {
    out.macro_precision = psum / wsum;
    out.macro_recall = rsum / wsum;
  }
  return out;
}

}  // namespace ecgfuse::metrics
