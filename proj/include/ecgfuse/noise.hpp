#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecgfuse/beats.hpp"

namespace ecgfuse::noise {

struct ZeroPowerSignal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroPowerNoise : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoiseRecordMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind {
  Awgn,
  BaselineWander,
  MuscleArtifact,
  ElectrodeMotion,
  NstdbBw,
  NstdbEm,
  NstdbMa,
};

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& name);
bool kind_needs_record(Kind k);

constexpr double kCleanSnrDb = std::numeric_limits<double>::infinity();

struct NoiseSpec {
  Kind kind = Kind::Awgn;
  double snr_db = kCleanSnrDb;  // +inf means "leave the beat clean"
  std::uint64_t seed = 0;
};

// Mean-removed mean square (population variance).
double signal_power(const std::vector<double>& v);

// alpha * noise with alpha = sqrt(P_s / (P_n * 10^(snr_db/10))); the achieved
// SNR is exact by construction.
std::vector<double> scale_to_snr(const std::vector<double>& signal,
                                 const std::vector<double>& noise, double snr_db);

// i.i.d. standard normals, Box-Muller over mt19937_64.
std::vector<double> gen_awgn(std::size_t len, std::uint64_t seed);

// Deterministic waveform kernels, exposed so tests can pin their parameters.
std::vector<double> bw_waveform(std::size_t len, const std::vector<double>& cycles,
                                const std::vector<double>& phases,
                                const std::vector<double>& amplitudes);
std::vector<double> first_difference(const std::vector<double>& v);
std::vector<double> em_waveform(std::size_t len, const std::vector<std::size_t>& onsets,
                                const std::vector<double>& signs, double tau);

// Seeded surrogates: BW = two sinusoids at 0.5-2.0 cycles over the window
// with random phase/amplitude; MA = first difference of white noise; EM =
// 1-3 random-onset exponentially decaying steps (tau = len/8).
std::vector<double> gen_bw(std::size_t len, double rate_hz, std::uint64_t seed);
std::vector<double> gen_ma(std::size_t len, std::uint64_t seed);
std::vector<double> gen_em(std::size_t len, std::uint64_t seed);

// Raw noise for a spec, before SNR scaling. NSTDB kinds take a seed-chosen
// excerpt of the matching channel of `nstdb`.
std::vector<double> make_noise(std::size_t len, const NoiseSpec& spec,
                               const std::vector<double>* nstdb);

// mV-space addition at the requested SNR followed by min-max normalization
// (the classifiers only ever see normalized beats).
beats::Beat apply_noise(const beats::Beat& beat_mv, const NoiseSpec& spec,
                        const std::vector<double>* nstdb = nullptr);

// Same, but also exposes the noisy mV trace for SNR verification.
struct NoisyBeat {
  std::vector<double> mv;
  beats::Beat normalized;
};
NoisyBeat apply_noise_detailed(const beats::Beat& beat_mv, const NoiseSpec& spec,
                               const std::vector<double>* nstdb = nullptr);

}  // namespace ecgfuse::noise
