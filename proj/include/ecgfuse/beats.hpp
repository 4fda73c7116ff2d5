#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecgfuse/wfdb.hpp"

namespace ecgfuse::beats {

struct EmptyRecord : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyClass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Beat {
  std::vector<double> samples;  // length L; mV before normalization, [0,1] after
  int label = 0;                // AamiClass index
  std::string record_id;
  std::int64_t r_peak = -1;
};

enum class Split { Train, Test };

struct Dataset {
  std::vector<Beat> beats;
  std::vector<Split> split;  // parallel to beats
  int m = wfdb::kNumAamiClasses;
  std::uint64_t seed = 0;

  std::vector<std::size_t> indices(Split s) const;
  std::vector<std::size_t> class_counts(Split s) const;
};

struct SegmentParams {
  double pre_ms = 250.0;
  double post_ms = 400.0;
  int length = 187;
};

// Extract a fixed window around each annotated R-peak and linearly resample
// it to exactly `length` samples. Beats whose window leaves the record are
// dropped. Non-beat annotations must already be filtered out by the caller
// via map_to_aami.
std::vector<Beat> segment_beats(const std::vector<double>& signal_mv, double rate_hz,
                                const std::vector<wfdb::Annotation>& annotations,
                                const std::string& record_id,
                                const SegmentParams& params = {});

// Linear resampling; preserves endpoints and affine inputs exactly.
std::vector<double> resample_linear(const std::vector<double>& v, int out_len);

// (v - min) / (max - min); constant input maps to all 0.5.
std::vector<double> minmax_normalize(const std::vector<double>& v);

// Per-class shuffle then floor(ratio*c)/rest split, deterministic per seed.
Dataset stratified_split(std::vector<Beat> beats, int m, double ratio, std::uint64_t seed);

struct SmoteResult {
  std::vector<Beat> beats;
  std::vector<std::string> warnings;  // singleton classes duplicated verbatim
};

// Upsample every class in `train` to the majority count with synthetic beats
// interpolated toward one of k same-class nearest neighbors. Originals pass
// through unchanged, in order, ahead of the synthetic beats.
SmoteResult smote(const std::vector<Beat>& train, int m, int k, std::uint64_t seed);

// Apply stratified_split then SMOTE on the training half only.
Dataset make_dataset(std::vector<Beat> beats, int m, double ratio, int smote_k,
                     std::uint64_t seed, bool balance = true);

}  // namespace ecgfuse::beats
