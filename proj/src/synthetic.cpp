#include "ecgfuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ecgfuse/rng.hpp"

namespace ecgfuse::synthetic {

namespace {

void add_bump(std::vector<double>& v, double center, double width, double amp) {
  const auto n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = static_cast<double>(i) / (n - 1.0);
    const double d = (t - center) / width;
    v[i] += amp * std::exp(-0.5 * d * d);
  }
}

struct BumpSpec {
  double center, width, amp;
};

// Morphology templates, loosely after the class archetypes: N has a sharp
// R wave with P and T; S fires early and narrow; V is broad with an
// inverted T; F sits between N and V; Q is a paced-looking double spike.
std::vector<BumpSpec> template_bumps(int label) {
  switch (label) {
    case 0: return {{0.25, 0.040, 0.15}, {0.42, 0.020, 1.20}, {0.65, 0.070, 0.30}};
    case 1: return {{0.20, 0.030, 0.10}, {0.34, 0.014, 1.10}, {0.60, 0.060, 0.25}};
    case 2: return {{0.45, 0.080, 1.40}, {0.70, 0.070, -0.35}};
    case 3: return {{0.30, 0.035, 0.12}, {0.44, 0.050, 0.95}, {0.68, 0.070, 0.15}};
    case 4: return {{0.38, 0.018, 0.80}, {0.50, 0.018, 0.80}, {0.70, 0.060, 0.20}};
    default: throw std::invalid_argument("label out of range");
  }
}

}  // namespace

std::vector<double> class_template(int label, int length) {
  std::vector<double> v(static_cast<std::size_t>(length), 0.0);
  for (const auto& b : template_bumps(label)) add_bump(v, b.center, b.width, b.amp);
  return v;
}

std::vector<beats::Beat> make_beats(const std::vector<std::size_t>& per_class_counts,
                                    int length, std::uint64_t seed) {
  std::vector<beats::Beat> out;
  for (std::size_t c = 0; c < per_class_counts.size(); ++c) {
    Rng rng(seed + 7919 * (c + 1));
    for (std::size_t k = 0; k < per_class_counts[c]; ++k) {
      std::vector<double> v(static_cast<std::size_t>(length), 0.0);
      for (const auto& b : template_bumps(static_cast<int>(c))) {
        add_bump(v, b.center + rng.uniform(-0.02, 0.02), b.width * rng.uniform(0.9, 1.1),
                 b.amp * rng.uniform(0.85, 1.15));
      }
      // mild baseline drift plus measurement noise
      const double drift_amp = rng.uniform(0.0, 0.08);
      const double drift_phase = rng.uniform(0.0, 2.0 * M_PI);
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(v.size());
        v[i] += drift_amp * std::sin(2.0 * M_PI * t + drift_phase) + 0.04 * rng.normal();
      }
      beats::Beat b;
      b.samples = std::move(v);
      b.label = static_cast<int>(c);
      b.record_id = "synthetic";
      b.r_peak = static_cast<std::int64_t>(k);
      out.push_back(std::move(b));
    }
  }
  return out;
}

SyntheticRecord make_record(const std::string& name, int beats_per_class, double rate_hz,
                            std::uint64_t seed) {
  const int beat_span = static_cast<int>(std::lround(0.8 * rate_hz));  // ~75 bpm
  const int n_beats = 2 * beats_per_class;
  const std::int64_t n_samples = static_cast<std::int64_t>(n_beats + 1) * beat_span;

  Rng rng(seed);
  std::vector<int> labels;
  for (int i = 0; i < beats_per_class; ++i) {
    labels.push_back(0);
    labels.push_back(2);
  }
  rng.shuffle(labels);

  std::vector<double> ch0(static_cast<std::size_t>(n_samples), 0.0);
  std::vector<wfdb::Annotation> anns;
  const int wave_len = static_cast<int>(std::lround(0.65 * rate_hz));
  for (int b = 0; b < n_beats; ++b) {
    const std::int64_t onset = static_cast<std::int64_t>(b + 1) * beat_span - wave_len / 2;
    const auto tmpl = class_template(labels[static_cast<std::size_t>(b)], wave_len);
    for (int i = 0; i < wave_len; ++i) {
      const std::int64_t idx = onset + i;
      if (idx >= 0 && idx < n_samples) ch0[static_cast<std::size_t>(idx)] += tmpl[static_cast<std::size_t>(i)];
    }
    wfdb::Annotation a;
    // R peak sits at the template's dominant bump (42% or 45% into the wave)
    a.sample_index = onset + static_cast<std::int64_t>(
                                 std::lround((labels[static_cast<std::size_t>(b)] == 0 ? 0.42 : 0.45) *
                                             wave_len));
    a.symbol = labels[static_cast<std::size_t>(b)] == 0 ? 'N' : 'V';
    anns.push_back(a);
  }
  for (auto& s : ch0) s += 0.02 * rng.normal();

  const double gain = 200.0;
  const int baseline = 1024;
  std::vector<int> adu;
  adu.reserve(static_cast<std::size_t>(2 * n_samples));
  std::vector<long> checksum(2, 0);
  std::vector<int> initial(2, 0);
  for (std::int64_t i = 0; i < n_samples; ++i) {
    for (int ch = 0; ch < 2; ++ch) {
      const double mv = ch == 0 ? ch0[static_cast<std::size_t>(i)]
                                : 0.6 * ch0[static_cast<std::size_t>(i)];
      int v = static_cast<int>(std::lround(mv * gain)) + baseline;
      v = std::clamp(v, -2048, 2047);
      if (i == 0) initial[static_cast<std::size_t>(ch)] = v;
      checksum[static_cast<std::size_t>(ch)] += v;
      adu.push_back(v);
    }
  }

  SyntheticRecord rec;
  rec.header.record_name = name;
  rec.header.n_signals = 2;
  rec.header.sampling_rate = rate_hz;
  rec.header.n_samples = n_samples;
  for (int ch = 0; ch < 2; ++ch) {
    wfdb::SignalSpec sig;
    sig.file_name = name + ".dat";
    sig.format_code = 212;
    sig.gain = gain;
    sig.baseline = baseline;
    sig.adc_zero = baseline;
    sig.initial_value = initial[static_cast<std::size_t>(ch)];
    // WFDB stores the 16-bit sum as a signed value
    sig.checksum = static_cast<std::int16_t>(checksum[static_cast<std::size_t>(ch)] & 0xFFFF);
    sig.description = ch == 0 ? "MLII" : "V1";
    rec.header.signals.push_back(sig);
  }
  rec.dat_bytes = wfdb::encode_fmt212(adu);
  rec.atr_bytes = wfdb::encode_annotations(anns);
  return rec;
}

std::string write_record(const SyntheticRecord& rec, const std::string& dir) {
  const std::string prefix = dir + "/" + rec.header.record_name;
  {
    std::ofstream hea(prefix + ".hea");
    hea << rec.header.record_name << ' ' << rec.header.n_signals << ' '
        << rec.header.sampling_rate << ' ' << rec.header.n_samples << '\n';
    for (const auto& s : rec.header.signals) {
      hea << s.file_name << " 212 " << s.gain << '(' << s.baseline << ")/mV " << s.adc_resolution
          << ' ' << s.adc_zero << ' ' << s.initial_value << ' ' << *s.checksum << " 0 "
          << s.description << '\n';
    }
  }
  {
    std::ofstream dat(prefix + ".dat", std::ios::binary);
    dat.write(reinterpret_cast<const char*>(rec.dat_bytes.data()),
              static_cast<std::streamsize>(rec.dat_bytes.size()));
  }
  {
    std::ofstream atr(prefix + ".atr", std::ios::binary);
    atr.write(reinterpret_cast<const char*>(rec.atr_bytes.data()),
              static_cast<std::streamsize>(rec.atr_bytes.size()));
  }
  return prefix;
}

}  // namespace ecgfuse::synthetic
