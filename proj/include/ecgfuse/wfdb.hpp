#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecgfuse::wfdb {

struct MalformedHeader : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedFormat : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncatedStream : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownCode : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RaggedRows : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LabelOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SignalSpec {
  std::string file_name;
  int format_code = 212;
  double gain = 200.0;  // adu per mV; WFDB default when absent
  int baseline = 0;
  int adc_resolution = 12;
  int adc_zero = 0;
  int initial_value = 0;
  std::optional<std::int32_t> checksum;  // 16-bit, signed in header text
  std::string description;
};

struct RecordHeader {
  std::string record_name;
  int n_signals = 0;
  double sampling_rate = 0.0;
  std::int64_t n_samples = 0;
  std::vector<SignalSpec> signals;
};

struct Annotation {
  std::int64_t sample_index = 0;
  char symbol = '?';
  int subtype = 0;
  int channel = 0;
  int num = 0;
  std::string aux;
};

enum class AamiClass { N = 0, S = 1, V = 2, F = 3, Q = 4 };

constexpr int kNumAamiClasses = 5;

const char* aami_name(AamiClass c);

// Parse a WFDB .hea file. Only format 212 signals are accepted.
RecordHeader parse_header(const std::string& text);

// Decode WFDB format 212: two 12-bit two's-complement samples per 3 bytes.
// Returns samples interleaved by channel, shape [n_samples][n_signals].
std::vector<std::vector<int>> decode_fmt212(const std::vector<std::uint8_t>& bytes,
                                            std::int64_t n_samples, int n_signals);

// Inverse of decode_fmt212 over an even-count flat sample stream. Exists for
// round-trip tests and for writing synthetic records.
std::vector<std::uint8_t> encode_fmt212(const std::vector<int>& samples);

// Parse a MIT .atr annotation stream (16-bit LE words, zero-word terminated).
std::vector<Annotation> parse_annotations(const std::vector<std::uint8_t>& bytes);

// Serialize annotations back to the MIT format. Test/synthetic-data support.
std::vector<std::uint8_t> encode_annotations(const std::vector<Annotation>& anns);

// AAMI EC57 beat grouping; non-beat symbols yield nullopt.
std::optional<AamiClass> map_to_aami(char symbol);

// (adu - baseline) / gain, per sample.
std::vector<double> adu_to_mv(const std::vector<int>& samples, double gain, int baseline);

struct BeatRow {
  std::vector<double> samples;
  int label = 0;
};

// CSV fallback: L reals followed by one integer label in [0, m).
std::vector<BeatRow> load_beat_csv(const std::string& path, int m);
void save_beat_csv(const std::string& path, const std::vector<BeatRow>& rows);

struct Record {
  RecordHeader header;
  std::vector<std::vector<int>> samples_adu;  // [n_samples][n_signals]
  std::vector<Annotation> annotations;
};

// Read .hea/.dat/.atr for a record path prefix (annotations optional).
Record read_record(const std::string& path_prefix);

// Pick the lead II channel by description ("II" or "MLII"); override wins.
int select_lead(const RecordHeader& header, std::optional<int> override_index);

}  // namespace ecgfuse::wfdb
