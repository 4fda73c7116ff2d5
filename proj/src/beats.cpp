#include "ecgfuse/beats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ecgfuse/rng.hpp"

namespace ecgfuse::beats {

std::vector<std::size_t> Dataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < beats.size(); ++i)
    if (split[i] == s) out.push_back(i);
  return out;
}

std::vector<std::size_t> Dataset::class_counts(Split s) const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(m), 0);
  for (std::size_t i = 0; i < beats.size(); ++i)
    if (split[i] == s) ++counts[static_cast<std::size_t>(beats[i].label)];
  return counts;
}

std::vector<double> resample_linear(const std::vector<double>& v, int out_len) {
  if (v.empty() || out_len < 1) throw std::invalid_argument("resample: empty input or length");
  std::vector<double> out(static_cast<std::size_t>(out_len));
  if (v.size() == 1 || out_len == 1) {
    std::fill(out.begin(), out.end(), v[0]);
    return out;
  }
  const double step = static_cast<double>(v.size() - 1) / (out_len - 1);
  for (int i = 0; i < out_len; ++i) {
    const double pos = i * step;
    const std::size_t lo = std::min(static_cast<std::size_t>(pos), v.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    out[static_cast<std::size_t>(i)] = v[lo] + frac * (v[lo + 1] - v[lo]);
  }
  return out;
}

std::vector<Beat> segment_beats(const std::vector<double>& signal_mv, double rate_hz,
                                const std::vector<wfdb::Annotation>& annotations,
                                const std::string& record_id, const SegmentParams& params) {
  if (signal_mv.empty()) throw EmptyRecord("record has no samples: " + record_id);
  const auto pre = static_cast<std::int64_t>(std::llround(params.pre_ms * rate_hz / 1000.0));
  const auto post = static_cast<std::int64_t>(std::llround(params.post_ms * rate_hz / 1000.0));
  std::vector<Beat> out;
  for (const auto& ann : annotations) {
    const auto cls = wfdb::map_to_aami(ann.symbol);
    if (!cls) continue;
    const std::int64_t start = ann.sample_index - pre;
    const std::int64_t end = ann.sample_index + post;  // exclusive
    if (start < 0 || end > static_cast<std::int64_t>(signal_mv.size())) continue;
    std::vector<double> window(signal_mv.begin() + static_cast<std::ptrdiff_t>(start),
                               signal_mv.begin() + static_cast<std::ptrdiff_t>(end));
    Beat b;
    b.samples = resample_linear(window, params.length);
    b.label = static_cast<int>(*cls);
    b.record_id = record_id;
    b.r_peak = ann.sample_index;
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<double> minmax_normalize(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("minmax_normalize: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(v.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double inv = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) * inv;
  return out;
}

Dataset stratified_split(std::vector<Beat> beats, int m, double ratio, std::uint64_t seed) {
  if (ratio <= 0.0 || ratio >= 1.0)
    throw std::invalid_argument("split ratio must be in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < beats.size(); ++i) {
    if (beats[i].label < 0 || beats[i].label >= m)
      throw std::invalid_argument("beat label out of range");
    by_class[static_cast<std::size_t>(beats[i].label)].push_back(i);
  }
  Dataset ds;
  ds.beats = std::move(beats);
  ds.split.assign(ds.beats.size(), Split::Test);
  ds.m = m;
  ds.seed = seed;
  for (int c = 0; c < m; ++c) {
    auto& idx = by_class[static_cast<std::size_t>(c)];
    if (idx.empty()) continue;
    Rng rng(seed + static_cast<std::uint64_t>(c));  // per-class sub-seed
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(idx.size())));
    if (n_train == idx.size())
      throw EmptyClass("class " + std::to_string(c) + " would have an empty test split");
    for (std::size_t i = 0; i < idx.size(); ++i)
      ds.split[idx[i]] = i < n_train ? Split::Train : Split::Test;
  }
  return ds;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Indices of the k nearest same-class neighbors of `self` (excluding itself).
std::vector<std::size_t> knn(const std::vector<const Beat*>& members, std::size_t self, int k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (j == self) continue;
    d.emplace_back(sq_dist(members[self]->samples, members[j]->samples), j);
  }
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < kk; ++j) out.push_back(d[j].second);
  return out;
}

}  // namespace

SmoteResult smote(const std::vector<Beat>& train, int m, int k, std::uint64_t seed) {
  std::vector<std::vector<const Beat*>> by_class(static_cast<std::size_t>(m));
  for (const auto& b : train) by_class[static_cast<std::size_t>(b.label)].push_back(&b);
  std::size_t majority = 0;
  for (const auto& cls : by_class) majority = std::max(majority, cls.size());

  SmoteResult res;
  res.beats = train;  // originals pass through unchanged, in order
  for (int c = 0; c < m; ++c) {
    const auto& members = by_class[static_cast<std::size_t>(c)];
    if (members.empty() || members.size() >= majority) continue;
    Rng rng(seed + static_cast<std::uint64_t>(c));  // per-class sub-seed
    const std::size_t deficit = majority - members.size();
    if (members.size() == 1) {
      res.warnings.push_back("class " + std::to_string(c) +
                             " has a single member; duplicating it verbatim");
      for (std::size_t i = 0; i < deficit; ++i) {
        Beat b = *members[0];
        b.record_id = "smote";
        res.beats.push_back(std::move(b));
      }
      continue;
    }
    // Precompute neighbor lists once per base point.
    std::vector<std::vector<std::size_t>> neighbors(members.size());
    for (std::size_t i = 0; i < deficit; ++i) {
      const std::size_t base = static_cast<std::size_t>(rng.uniform_int(members.size()));
      if (neighbors[base].empty()) neighbors[base] = knn(members, base, k);
      const auto& nn = neighbors[base];
      const std::size_t pick = nn[static_cast<std::size_t>(rng.uniform_int(nn.size()))];
      const double u = rng.uniform();
      Beat b;
      b.label = c;
      b.record_id = "smote";
      b.samples.resize(members[base]->samples.size());
      for (std::size_t s = 0; s < b.samples.size(); ++s) {
        const double x = members[base]->samples[s];
        b.samples[s] = x + u * (members[pick]->samples[s] - x);
      }
      res.beats.push_back(std::move(b));
    }
  }
  return res;
}

Dataset make_dataset(std::vector<Beat> beats, int m, double ratio, int smote_k,
                     std::uint64_t seed, bool balance) {
  Dataset ds = stratified_split(std::move(beats), m, ratio, seed);
  if (!balance) return ds;
  std::vector<Beat> train;
  std::vector<Beat> test;
  for (std::size_t i = 0; i < ds.beats.size(); ++i)
    (ds.split[i] == Split::Train ? train : test).push_back(ds.beats[i]);
  auto res = smote(train, m, smote_k, seed);
  Dataset out;
  out.m = m;
  out.seed = seed;
  out.beats = std::move(res.beats);
  out.split.assign(out.beats.size(), Split::Train);
  for (auto& b : test) {
    out.beats.push_back(std::move(b));
    out.split.push_back(Split::Test);
  }
  return out;
}

}  // namespace ecgfuse::beats
