#include "ecgfuse/noise.hpp"

#include <cmath>

#include "ecgfuse/rng.hpp"

namespace ecgfuse::noise {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Awgn: return "awgn";
    case Kind::BaselineWander: return "bw";
    case Kind::MuscleArtifact: return "ma";
    case Kind::ElectrodeMotion: return "em";
    case Kind::NstdbBw: return "nstdb_bw";
    case Kind::NstdbEm: return "nstdb_em";
    case Kind::NstdbMa: return "nstdb_ma";
  }
  return "?";
}

Kind kind_from_name(const std::string& name) {
  for (Kind k : {Kind::Awgn, Kind::BaselineWander, Kind::MuscleArtifact, Kind::ElectrodeMotion,
                 Kind::NstdbBw, Kind::NstdbEm, Kind::NstdbMa})
    if (name == kind_name(k)) return k;
  throw std::invalid_argument("unknown noise kind: " + name);
}

bool kind_needs_record(Kind k) {
  return k == Kind::NstdbBw || k == Kind::NstdbEm || k == Kind::NstdbMa;
}

double signal_power(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("signal_power: empty input");
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double p = 0;
  for (double x : v) p += (x - mean) * (x - mean);
  return p / static_cast<double>(v.size());
}

std::vector<double> scale_to_snr(const std::vector<double>& signal,
                                 const std::vector<double>& noise, double snr_db) {
  const double ps = signal_power(signal);
  const double pn = signal_power(noise);
  if (ps <= 0) throw ZeroPowerSignal("signal has zero power");
  if (pn <= 0) throw ZeroPowerNoise("noise has zero power");
  const double alpha = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  std::vector<double> out(noise.size());
  for (std::size_t i = 0; i < noise.size(); ++i) out[i] = alpha * noise[i];
  return out;
}

std::vector<double> gen_awgn(std::size_t len, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(len);
  for (auto& x : out) x = rng.normal();
  return out;
}

std::vector<double> bw_waveform(std::size_t len, const std::vector<double>& cycles,
                                const std::vector<double>& phases,
                                const std::vector<double>& amplitudes) {
  std::vector<double> out(len, 0.0);
  for (std::size_t k = 0; k < cycles.size(); ++k)
    for (std::size_t i = 0; i < len; ++i)
      out[i] += amplitudes[k] *
                std::sin(2.0 * M_PI * cycles[k] * static_cast<double>(i) /
                             static_cast<double>(len) +
                         phases[k]);
  return out;
}

std::vector<double> first_difference(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("first_difference needs >= 2 samples");
  std::vector<double> out(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out[i] = v[i + 1] - v[i];
  return out;
}

std::vector<double> em_waveform(std::size_t len, const std::vector<std::size_t>& onsets,
                                const std::vector<double>& signs, double tau) {
  std::vector<double> out(len, 0.0);
  for (std::size_t k = 0; k < onsets.size(); ++k)
    for (std::size_t i = onsets[k]; i < len; ++i)
      out[i] += signs[k] * std::exp(-static_cast<double>(i - onsets[k]) / tau);
  return out;
}

std::vector<double> gen_bw(std::size_t len, double /*rate_hz*/, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cycles(2), phases(2), amps(2);
  for (int k = 0; k < 2; ++k) {
    cycles[static_cast<std::size_t>(k)] = rng.uniform(0.5, 2.0);
    phases[static_cast<std::size_t>(k)] = rng.uniform(0.0, 2.0 * M_PI);
    amps[static_cast<std::size_t>(k)] = rng.uniform(0.5, 1.0);
  }
  return bw_waveform(len, cycles, phases, amps);
}

std::vector<double> gen_ma(std::size_t len, std::uint64_t seed) {
  return first_difference(gen_awgn(len + 1, seed));
}

std::vector<double> gen_em(std::size_t len, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n_steps = 1 + rng.uniform_int(3);
  std::vector<std::size_t> onsets(n_steps);
  std::vector<double> signs(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    onsets[k] = static_cast<std::size_t>(rng.uniform_int(len));
    signs[k] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  return em_waveform(len, onsets, signs, static_cast<double>(len) / 8.0);
}

std::vector<double> make_noise(std::size_t len, const NoiseSpec& spec,
                               const std::vector<double>* nstdb) {
  switch (spec.kind) {
    case Kind::Awgn: return gen_awgn(len, spec.seed);
    case Kind::BaselineWander: return gen_bw(len, 0.0, spec.seed);
    case Kind::MuscleArtifact: return gen_ma(len, spec.seed);
    case Kind::ElectrodeMotion: return gen_em(len, spec.seed);
    case Kind::NstdbBw:
    case Kind::NstdbEm:
    case Kind::NstdbMa: {
      if (nstdb == nullptr || nstdb->size() < len)
        throw NoiseRecordMissing("NSTDB noise needs a loaded record with >= " +
                                 std::to_string(len) + " samples");
      Rng rng(spec.seed);
      const std::size_t offset = static_cast<std::size_t>(rng.uniform_int(nstdb->size() - len + 1));
      return std::vector<double>(nstdb->begin() + static_cast<std::ptrdiff_t>(offset),
                                 nstdb->begin() + static_cast<std::ptrdiff_t>(offset + len));
    }
  }
  throw std::logic_error("unreachable noise kind");
}

NoisyBeat apply_noise_detailed(const beats::Beat& beat_mv, const NoiseSpec& spec,
                               const std::vector<double>* nstdb) {
  NoisyBeat out;
  if (std::isinf(spec.snr_db) && spec.snr_db > 0) {
    out.mv = beat_mv.samples;
  } else {
    const auto raw = make_noise(beat_mv.samples.size(), spec, nstdb);
    const auto scaled = scale_to_snr(beat_mv.samples, raw, spec.snr_db);
    out.mv.resize(beat_mv.samples.size());
    for (std::size_t i = 0; i < out.mv.size(); ++i)
      out.mv[i] = beat_mv.samples[i] + scaled[i];
  }
  out.normalized = beat_mv;
  out.normalized.samples = beats::minmax_normalize(out.mv);
  return out;
}

beats::Beat apply_noise(const beats::Beat& beat_mv, const NoiseSpec& spec,
                        const std::vector<double>* nstdb) {
  return apply_noise_detailed(beat_mv, spec, nstdb).normalized;
}

}  // namespace ecgfuse::noise
