#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecgfuse/beats.hpp"
#include "ecgfuse/wfdb.hpp"

namespace ecgfuse::synthetic {

// Deterministic beat generator with one morphology template per AAMI class
// (distinct spike position/width plus jittered amplitudes and additive
// noise). Used by the test-suite and by the "synthetic" dataset source so
// the whole pipeline can run without the licensed recordings.
std::vector<beats::Beat> make_beats(const std::vector<std::size_t>& per_class_counts,
                                    int length, std::uint64_t seed);

// One template beat without jitter, in mV.
std::vector<double> class_template(int label, int length);

struct SyntheticRecord {
  wfdb::RecordHeader header;
  std::vector<std::uint8_t> dat_bytes;
  std::vector<std::uint8_t> atr_bytes;
};

// A two-channel format-212 record with annotated beats, checksums and
// initial values filled in. `beats_per_class` beats of each of N and V.
SyntheticRecord make_record(const std::string& name, int beats_per_class, double rate_hz,
                            std::uint64_t seed);

// Write .hea/.dat/.atr files under dir, returning the record path prefix.
std::string write_record(const SyntheticRecord& rec, const std::string& dir);

}  // namespace ecgfuse::synthetic
