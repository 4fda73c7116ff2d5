#include "ecgfuse/wfdb.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ecgfuse::wfdb {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

long parse_long(const std::string& tok, const char* what) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (...) {
    throw MalformedHeader(std::string("non-numeric ") + what + ": '" + tok + "'");
  }
  if (pos != tok.size())
    throw MalformedHeader(std::string("trailing characters in ") + what + ": '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok, const char* what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (...) {
    throw MalformedHeader(std::string("non-numeric ") + what + ": '" + tok + "'");
  }
  if (pos != tok.size())
    throw MalformedHeader(std::string("trailing characters in ") + what + ": '" + tok + "'");
  return v;
}

// Gain token grammar: gain[(baseline)][/units], e.g. "200(995)/mV".
void parse_gain_token(const std::string& tok, SignalSpec& sig) {
  std::string body = tok;
  auto slash = body.find('/');
  if (slash != std::string::npos) body = body.substr(0, slash);
  auto paren = body.find('(');
  std::optional<int> baseline;
  if (paren != std::string::npos) {
    auto close = body.find(')', paren);
    if (close == std::string::npos) throw MalformedHeader("unclosed baseline in gain token: " + tok);
    baseline = static_cast<int>(parse_long(body.substr(paren + 1, close - paren - 1), "baseline"));
    body = body.substr(0, paren);
  }
  double gain = body.empty() ? 0.0 : parse_real(body, "gain");
  sig.gain = gain != 0.0 ? gain : 200.0;
  if (baseline) sig.baseline = *baseline;
  if (sig.gain <= 0) throw MalformedHeader("negative gain in token: " + tok);
}

int sign_extend_12(int v) { return v >= 2048 ? v - 4096 : v; }

// MIT annotation code table (codes 1..41). Index 0 unused.
constexpr std::array<char, 42> kCodeSymbols = {
    '?', 'N', 'L', 'R', 'a', 'V', 'F', 'J', 'A', 'S', 'E', 'j', '/', 'Q',
    '~', '?', '|', '?', 's', 'T', '*', 'D', '"', '=', 'p', 'B', '^', 't',
    '+', 'u', '?', '!', '[', ']', 'e', 'n', '@', 'x', 'f', '(', ')', 'r'};

constexpr int kSkip = 59, kNum = 60, kSub = 61, kChn = 62, kAux = 63;

int symbol_to_code(char sym) {
  for (int c = 1; c < static_cast<int>(kCodeSymbols.size()); ++c)
    if (kCodeSymbols[static_cast<std::size_t>(c)] == sym) return c;
  return 30;  // '?'
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

}  // namespace

const char* aami_name(AamiClass c) {
  switch (c) {
    case AamiClass::N: return "N";
    case AamiClass::S: return "S";
    case AamiClass::V: return "V";
    case AamiClass::F: return "F";
    case AamiClass::Q: return "Q";
  }
  return "?";
}

RecordHeader parse_header(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw MalformedHeader("empty header");

  RecordHeader hdr;
  auto first = split_ws(lines[0]);
  if (first.size() < 4)
    throw MalformedHeader("record line needs 'name n_signals rate n_samples'");
  // Record name may carry a /segment-count suffix; strip it.
  hdr.record_name = first[0].substr(0, first[0].find('/'));
  hdr.n_signals = static_cast<int>(parse_long(first[1], "n_signals"));
  hdr.sampling_rate = parse_real(first[2], "sampling_rate");
  hdr.n_samples = parse_long(first[3], "n_samples");
  if (hdr.n_signals < 1) throw MalformedHeader("n_signals must be >= 1");
  if (hdr.sampling_rate <= 0) throw MalformedHeader("sampling_rate must be > 0");
  if (static_cast<int>(lines.size()) < 1 + hdr.n_signals)
    throw MalformedHeader("missing signal specification lines");

  for (int i = 0; i < hdr.n_signals; ++i) {
    auto toks = split_ws(lines[static_cast<std::size_t>(1 + i)]);
    if (toks.size() < 2) throw MalformedHeader("signal line needs at least 'file format'");
    SignalSpec sig;
    sig.file_name = toks[0];
    // Format token may carry xN/:S/+O modifiers; only the leading int matters.
    std::string fmt = toks[1];
    auto mod = fmt.find_first_of("x:+");
    if (mod != std::string::npos) fmt = fmt.substr(0, mod);
    sig.format_code = static_cast<int>(parse_long(fmt, "format"));
    if (sig.format_code != 212)
      throw UnsupportedFormat("unsupported signal format " + std::to_string(sig.format_code) +
                              " (only 212 is supported)");
    bool have_baseline = toks.size() > 2 && toks[2].find('(') != std::string::npos;
    if (toks.size() > 2) parse_gain_token(toks[2], sig);
    if (toks.size() > 3) sig.adc_resolution = static_cast<int>(parse_long(toks[3], "adc_res"));
    if (toks.size() > 4) sig.adc_zero = static_cast<int>(parse_long(toks[4], "adc_zero"));
    if (!have_baseline) sig.baseline = sig.adc_zero;
    if (toks.size() > 5) sig.initial_value = static_cast<int>(parse_long(toks[5], "init_value"));
    if (toks.size() > 6) sig.checksum = static_cast<std::int32_t>(parse_long(toks[6], "checksum"));
    if (toks.size() > 8) {
      std::string desc;
      for (std::size_t t = 8; t < toks.size(); ++t) {
        if (!desc.empty()) desc += ' ';
        desc += toks[t];
      }
      sig.description = desc;
    }
    hdr.signals.push_back(std::move(sig));
  }
  return hdr;
}

std::vector<std::vector<int>> decode_fmt212(const std::vector<std::uint8_t>& bytes,
                                            std::int64_t n_samples, int n_signals) {
  if (n_signals != 1 && n_signals != 2)
    throw std::invalid_argument("format 212 decoder supports 1 or 2 signals");
  const std::int64_t total = n_samples * n_signals;
  const std::int64_t needed = (3 * total + 1) / 2;
  if (static_cast<std::int64_t>(bytes.size()) < needed)
    throw TruncatedStream("format 212 stream too short: have " + std::to_string(bytes.size()) +
                          " bytes, need " + std::to_string(needed));
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n_samples),
                                    std::vector<int>(static_cast<std::size_t>(n_signals)));
  for (std::int64_t k = 0; k < total; ++k) {
    const std::int64_t group = k / 2;
    const std::uint8_t b0 = bytes[static_cast<std::size_t>(3 * group)];
    const std::uint8_t b1 = bytes[static_cast<std::size_t>(3 * group + 1)];
    const std::uint8_t b2 = bytes[static_cast<std::size_t>(3 * group + 2)];
    int v;
    if (k % 2 == 0)
      v = b0 | ((b1 & 0x0F) << 8);
    else
      v = b2 | ((b1 & 0xF0) << 4);
    out[static_cast<std::size_t>(k / n_signals)][static_cast<std::size_t>(k % n_signals)] =
        sign_extend_12(v);
  }
  return out;
}

std::vector<std::uint8_t> encode_fmt212(const std::vector<int>& samples) {
  if (samples.size() % 2 != 0)
    throw std::invalid_argument("format 212 encoder requires an even sample count");
  std::vector<std::uint8_t> out;
  out.reserve(samples.size() / 2 * 3);
  for (std::size_t i = 0; i < samples.size(); i += 2) {
    const int a = samples[i], b = samples[i + 1];
    if (a < -2048 || a > 2047 || b < -2048 || b > 2047)
      throw std::invalid_argument("sample out of 12-bit range");
    const unsigned ua = static_cast<unsigned>(a) & 0xFFF;
    const unsigned ub = static_cast<unsigned>(b) & 0xFFF;
    out.push_back(static_cast<std::uint8_t>(ua & 0xFF));
    out.push_back(static_cast<std::uint8_t>(((ua >> 8) & 0x0F) | (((ub >> 8) & 0x0F) << 4)));
    out.push_back(static_cast<std::uint8_t>(ub & 0xFF));
  }
  return out;
}

std::vector<Annotation> parse_annotations(const std::vector<std::uint8_t>& bytes) {
  std::vector<Annotation> out;
  std::int64_t time = 0;
  int cur_chan = 0, cur_num = 0;
  std::size_t i = 0;
  bool terminated = false;
  auto need = [&](std::size_t n) {
    if (i + n > bytes.size()) throw TruncatedStream("annotation stream ends mid-field");
  };
  while (i < bytes.size()) {
    need(2);
    const unsigned word = bytes[i] | (static_cast<unsigned>(bytes[i + 1]) << 8);
    i += 2;
    const int code = static_cast<int>(word >> 10);
    const int interval = static_cast<int>(word & 0x3FF);
    if (word == 0) {
      terminated = true;
      break;
    }
    if (code == kSkip) {
      // 32-bit interval follows, high 16-bit word first, each little-endian.
      need(4);
      const unsigned hi = bytes[i] | (static_cast<unsigned>(bytes[i + 1]) << 8);
      const unsigned lo = bytes[i + 2] | (static_cast<unsigned>(bytes[i + 3]) << 8);
      i += 4;
      time += static_cast<std::int32_t>((hi << 16) | lo);
    } else if (code == kNum) {
      cur_num = interval;
      if (!out.empty()) out.back().num = cur_num;
    } else if (code == kSub) {
      if (!out.empty()) out.back().subtype = interval;
    } else if (code == kChn) {
      cur_chan = interval;
      if (!out.empty()) out.back().channel = cur_chan;
    } else if (code == kAux) {
      need(static_cast<std::size_t>(interval));
      std::string aux(bytes.begin() + static_cast<std::ptrdiff_t>(i),
                      bytes.begin() + static_cast<std::ptrdiff_t>(i + interval));
      i += static_cast<std::size_t>(interval);
      if (interval % 2 != 0) {
        need(1);
        ++i;  // pad byte
      }
      if (!aux.empty() && aux.back() == '\0') aux.pop_back();
      if (!out.empty()) out.back().aux = aux;
    } else if (code > 63) {
      throw UnknownCode("annotation code " + std::to_string(code));
    } else {
      time += interval;
      Annotation ann;
      ann.sample_index = time;
      ann.symbol = code < static_cast<int>(kCodeSymbols.size())
                       ? kCodeSymbols[static_cast<std::size_t>(code)]
                       : '?';
      ann.channel = cur_chan;
      ann.num = cur_num;
      out.push_back(ann);
    }
  }
  if (!terminated) throw TruncatedStream("annotation stream missing zero terminator");
  return out;
}

std::vector<std::uint8_t> encode_annotations(const std::vector<Annotation>& anns) {
  std::vector<std::uint8_t> out;
  auto put_word = [&](unsigned w) {
    out.push_back(static_cast<std::uint8_t>(w & 0xFF));
    out.push_back(static_cast<std::uint8_t>((w >> 8) & 0xFF));
  };
  std::int64_t time = 0;
  int cur_chan = 0, cur_num = 0;
  for (const auto& ann : anns) {
    std::int64_t dt = ann.sample_index - time;
    if (dt < 0) throw std::invalid_argument("annotations must be time-ordered");
    if (dt > 0x3FF) {
      put_word(static_cast<unsigned>(kSkip) << 10);
      put_word(static_cast<unsigned>((dt >> 16) & 0xFFFF));
      put_word(static_cast<unsigned>(dt & 0xFFFF));
      dt = 0;
    }
    const int code = symbol_to_code(ann.symbol);
    put_word((static_cast<unsigned>(code) << 10) | static_cast<unsigned>(dt));
    time = ann.sample_index;
    if (ann.subtype != 0)
      put_word((static_cast<unsigned>(kSub) << 10) | (static_cast<unsigned>(ann.subtype) & 0x3FF));
    if (ann.channel != cur_chan) {
      cur_chan = ann.channel;
      put_word((static_cast<unsigned>(kChn) << 10) | (static_cast<unsigned>(cur_chan) & 0x3FF));
    }
    if (ann.num != cur_num) {
      cur_num = ann.num;
      put_word((static_cast<unsigned>(kNum) << 10) | (static_cast<unsigned>(cur_num) & 0x3FF));
    }
    if (!ann.aux.empty()) {
      std::string aux = ann.aux;
      put_word((static_cast<unsigned>(kAux) << 10) | (static_cast<unsigned>(aux.size()) & 0x3FF));
      out.insert(out.end(), aux.begin(), aux.end());
      if (aux.size() % 2 != 0) out.push_back(0);
    }
  }
  put_word(0);
  return out;
}

std::optional<AamiClass> map_to_aami(char symbol) {
  switch (symbol) {
    case 'N': case 'L': case 'R': case 'e': case 'j':
      return AamiClass::N;
    case 'A': case 'a': case 'J': case 'S':
      return AamiClass::S;
    case 'V': case 'E':
      return AamiClass::V;
    case 'F':
      return AamiClass::F;
    case '/': case 'f': case 'Q':
      return AamiClass::Q;
    default:
      return std::nullopt;
  }
}

std::vector<double> adu_to_mv(const std::vector<int>& samples, double gain, int baseline) {
  if (gain <= 0) throw std::invalid_argument("gain must be positive");
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    out[i] = (samples[i] - baseline) / gain;
  return out;
}

std::vector<BeatRow> load_beat_csv(const std::string& path, int m) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open beat CSV: " + path);
  std::vector<BeatRow> rows;
  std::string line;
  std::size_t expected_len = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      try {
        vals.push_back(std::stod(cell));
      } catch (...) {
        throw RaggedRows("line " + std::to_string(lineno) + ": bad value '" + cell + "'");
      }
    }
    if (vals.size() < 2)
      throw RaggedRows("line " + std::to_string(lineno) + ": need samples plus label");
    if (expected_len == 0) expected_len = vals.size();
    if (vals.size() != expected_len)
      throw RaggedRows("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(expected_len) + " columns, got " +
                       std::to_string(vals.size()));
    const double lbl = vals.back();
    vals.pop_back();
    const int label = static_cast<int>(lbl);
    if (lbl != label || label < 0 || label >= m)
      throw LabelOutOfRange("line " + std::to_string(lineno) + ": label " + std::to_string(lbl) +
                            " outside [0, " + std::to_string(m) + ")");
    rows.push_back(BeatRow{std::move(vals), label});
  }
  return rows;
}

void save_beat_csv(const std::string& path, const std::vector<BeatRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write beat CSV: " + path);
  out.precision(9);
  for (const auto& r : rows) {
    for (double v : r.samples) out << v << ',';
    out << r.label << '\n';
  }
}

Record read_record(const std::string& path_prefix) {
  std::ifstream hea(path_prefix + ".hea");
  if (!hea) throw std::runtime_error("cannot open header: " + path_prefix + ".hea");
  std::stringstream buf;
  buf << hea.rdbuf();
  Record rec;
  rec.header = parse_header(buf.str());

  // All signals of a format-212 record live in one .dat file.
  const auto slash = path_prefix.find_last_of('/');
  const std::string dir = slash == std::string::npos ? "" : path_prefix.substr(0, slash + 1);
  const auto dat = read_file_bytes(dir + rec.header.signals[0].file_name);
  rec.samples_adu = decode_fmt212(dat, rec.header.n_samples, rec.header.n_signals);

  std::ifstream atr(path_prefix + ".atr", std::ios::binary);
  if (atr) {
    std::vector<std::uint8_t> ab((std::istreambuf_iterator<char>(atr)),
                                 std::istreambuf_iterator<char>());
    rec.annotations = parse_annotations(ab);
  }
  return rec;
}

int select_lead(const RecordHeader& header, std::optional<int> override_index) {
  if (override_index) {
    if (*override_index < 0 || *override_index >= header.n_signals)
      throw std::out_of_range("lead index " + std::to_string(*override_index) +
                              " out of range for " + std::to_string(header.n_signals) +
                              " signals");
    return *override_index;
  }
  for (int i = 0; i < header.n_signals; ++i) {
    const auto& d = header.signals[static_cast<std::size_t>(i)].description;
    if (d == "II" || d == "MLII") return i;
  }
  return 0;
}

}  // namespace ecgfuse::wfdb
