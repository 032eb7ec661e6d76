// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lsdd/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "container.hpp"
#include "lsdd/angles.hpp"
#include "lsdd/error.hpp"

namespace lsdd {

namespace {

constexpr const char* kStftMagic = "LSDD-STFT";
constexpr std::size_t kDecimationTaps = 193;
constexpr double kDecimationCutoffHz = 7200.0;
constexpr double kGapWarningS = 1.0;

std::uint32_t le_u32(const std::string& b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t le_u16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

double read_sample(const std::string& b, std::size_t at, bool is_float, unsigned bits) {
  if (is_float) {
    if (bits == 32) return std::bit_cast<float>(le_u32(b, at));
    std::uint64_t lo = le_u32(b, at), hi = le_u32(b, at + 4);
    return std::bit_cast<double>(lo | hi << 32);
  }
  switch (bits) {
    case 16:
      return static_cast<std::int16_t>(le_u16(b, at)) / 32768.0;
    case 24: {
      const std::uint32_t u = static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
                              static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
                              static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16;
      return static_cast<std::int32_t>(u << 8) / 2147483648.0;
    }
    default:
      return static_cast<std::int32_t>(le_u32(b, at)) / 2147483648.0;
  }
}

}  // namespace

std::vector<double> decimation_filter() {
  std::vector<double> h(kDecimationTaps);
  const double fc = kDecimationCutoffHz / 48000.0;
  const double mid = (kDecimationTaps - 1) / 2.0;
  double sum = 0.0;
  for (std::size_t n = 0; n < kDecimationTaps; ++n) {
    const double x = static_cast<double>(n) - mid;
    const double sinc = x == 0.0 ? 2.0 * fc : std::sin(2.0 * angles::kPi * fc * x) / (angles::kPi * x);
    const double a = 2.0 * angles::kPi * static_cast<double>(n) / (kDecimationTaps - 1);
    const double blackman = 0.42 - 0.5 * std::cos(a) + 0.08 * std::cos(2.0 * a);
    h[n] = sinc * blackman;
    sum += h[n];
  }
  for (auto& v : h) v /= sum;
  return h;
}

std::vector<double> decimate_by_3(const std::vector<double>& x) {
  static const std::vector<double> h = decimation_filter();
  const auto half = static_cast<std::ptrdiff_t>(h.size() / 2);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> out;
  out.reserve(x.size() / 3 + 1);
  for (std::ptrdiff_t i = 0; i < n; i += 3) {
    double acc = 0.0;
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(h.size()); ++k) {
      const std::ptrdiff_t j = i + half - k;
      if (j >= 0 && j < n) acc += h[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(j)];
    }
    out.push_back(acc);
  }
  return out;
}

AudioData decode_wav(const std::string& b, std::optional<std::size_t> expected_channels) {
  if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0) {
    throw FormatError("not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  unsigned format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_at = 0, data_len = 0;
  bool have_data = false;
  while (pos + 8 <= b.size()) {
    const std::string id = b.substr(pos, 4);
    const std::size_t len = le_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (len < 16 || body + len > b.size()) throw FormatError("truncated fmt chunk");
      format = le_u16(b, body);
      channels = le_u16(b, body + 2);
      rate = le_u32(b, body + 4);
      bits = le_u16(b, body + 14);
      if (format == 0xFFFE) {
        if (len < 40) throw FormatError("truncated WAVE_FORMAT_EXTENSIBLE header");
        format = le_u16(b, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_at = body;
      data_len = std::min(len, b.size() - body);
      have_data = true;
    }
    pos = body + len + (len & 1U);
  }
  if (!have_fmt || !have_data) throw FormatError("WAVE file lacks a fmt or data chunk");
  const bool is_float = format == 3;
  if (!(format == 1 && (bits == 16 || bits == 24 || bits == 32)) &&
      !(is_float && (bits == 32 || bits == 64))) {
    throw FormatError("unsupported WAVE encoding: format " + std::to_string(format) + ", " +
                      std::to_string(bits) + " bits");
  }
  if (channels == 0) throw FormatError("WAVE file declares zero channels");
  if (rate != 16000 && rate != 48000) {
    throw FormatError("unsupported sample rate " + std::to_string(rate) +
                      " Hz (expected 16000 or 48000)");
  }
  if (expected_channels && *expected_channels != channels) {
    throw ParameterError("WAVE file has " + std::to_string(channels) +
                         " channels, array geometry has " + std::to_string(*expected_channels));
  }
  const std::size_t width = bits / 8;
  const std::size_t frames = data_len / (width * channels);
  AudioData audio;
  audio.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      audio.channels[c][n] = read_sample(b, data_at + (n * channels + c) * width, is_float, bits);
    }
  }
  audio.sample_rate_hz = rate;
  if (rate == 48000) {
    for (auto& ch : audio.channels) ch = decimate_by_3(ch);
    audio.sample_rate_hz = 16000.0;
  }
  return audio;
}

AudioData ingest_wav(const std::filesystem::path& path,
                     std::optional<std::size_t> expected_channels) {
  auto in = container::open_input(path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes, expected_channels);
}

void write_wav(const std::filesystem::path& path, const AudioData& audio) {
  if (audio.channels.empty()) throw ParameterError("no channels to write");
  const std::size_t frames = audio.channels.front().size();
  for (const auto& ch : audio.channels) {
    if (ch.size() != frames) throw ParameterError("channels differ in length");
  }
  const auto channels = static_cast<std::uint16_t>(audio.channels.size());
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate_hz));
  const auto data_len = static_cast<std::uint32_t>(frames * channels * 4);
  std::string out = "RIFF";
  put_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 3);
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * channels * 4);
  put_u16(out, static_cast<std::uint16_t>(channels * 4));
  put_u16(out, 32);
  out += "data";
  put_u32(out, data_len);
  for (std::size_t n = 0; n < frames; ++n) {
    for (const auto& ch : audio.channels) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(ch[n])));
    }
  }
  auto file = container::open_output(path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

void save_stft_tensor(const StftTensor& tensor, const std::filesystem::path& path) {
  auto out = container::open_output(path);
  out << kStftMagic << " 1\n"
      << "mics " << tensor.mic_count() << '\n'
      << "frames " << tensor.frame_count() << '\n'
      << "bins " << tensor.bin_count() << '\n'
      << "sample_rate_hz " << container::format_number(tensor.params.sample_rate_hz) << '\n'
      << "nfft " << tensor.params.nfft << '\n'
      << "hop " << tensor.params.hop << '\n'
      << "window " << to_string(tensor.params.window) << '\n'
      << "payload complex64-le\n"
      << "end\n";
  for (const auto& z : tensor.values.data()) {
    container::write_f32(out, static_cast<float>(z.real()));
    container::write_f32(out, static_cast<float>(z.imag()));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

StftTensor load_stft_tensor(const std::filesystem::path& path) {
  auto in = container::open_input(path);
  const std::string version = container::expect_field(in, kStftMagic);
  if (version != "1") throw FormatError("unsupported STFT container version '" + version + "'");
  const auto mics = container::parse_count(container::expect_field(in, "mics"), "mics");
  const auto frames = container::parse_count(container::expect_field(in, "frames"), "frames");
  const auto bins = container::parse_count(container::expect_field(in, "bins"), "bins");
  StftParams params;
  const auto rate = container::parse_numbers(container::expect_field(in, "sample_rate_hz"),
                                             "sample_rate_hz");
  if (rate.size() != 1 || !(rate[0] > 0.0)) throw FormatError("malformed sample_rate_hz");
  params.sample_rate_hz = rate[0];
  params.nfft = container::parse_count(container::expect_field(in, "nfft"), "nfft");
  params.hop = container::parse_count(container::expect_field(in, "hop"), "hop");
  try {
    params.window = parse_window_kind(container::expect_field(in, "window"));
  } catch (const ParameterError& e) {
    throw FormatError(e.what());
  }
  if (container::expect_field(in, "payload") != "complex64-le") {
    throw FormatError("unsupported payload encoding");
  }
  container::expect_field(in, "end");
  if (mics == 0 || params.nfft == 0 || params.hop == 0) {
    throw FormatError("malformed header: mics, nfft and hop must be >= 1");
  }
  if (bins != params.bin_count()) {
    throw FormatError("dimension mismatch: bins " + std::to_string(bins) + " but nfft " +
                      std::to_string(params.nfft) + " implies " +
                      std::to_string(params.bin_count()));
  }
  const auto raw = container::read_f32_payload(in, 2 * mics * frames * bins, "stft");
  StftTensor t = make_stft_tensor(mics, frames, params);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    t.values.data()[i] = cdouble(raw[2 * i], raw[2 * i + 1]);
  }
  return t;
}

namespace {

struct PendingSpeaker {
  std::vector<Keyframe> keys;
  std::vector<std::pair<double, bool>> flags;
  std::vector<Span> spans;
};

double parse_double(const std::string& s, std::size_t lineno, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("pose/vad line " + std::to_string(lineno) + ": bad " + what + " '" + s +
                      "'");
  }
}

}  // namespace

GroundTruth parse_pose_vad_text(const std::string& text) {
  std::map<std::string, PendingSpeaker> pending;
  std::vector<std::string> order;
  std::vector<Keyframe> yaw;
  std::optional<double> duration;
  double latest = 0.0;
  GroundTruth truth;

  auto speaker = [&](const std::string& id) -> PendingSpeaker& {
    auto it = pending.find(id);
    if (it == pending.end()) {
      order.push_back(id);
      it = pending.emplace(id, PendingSpeaker{}).first;
    }
    return it->second;
  };
  auto push_key = [&](std::vector<Keyframe>& keys, const std::string& who, double t, double az,
                      std::size_t lineno) {
    if (!keys.empty() && !(t > keys.back().t_s)) {
      throw FormatError("pose/vad line " + std::to_string(lineno) + ": timestamp " +
                        container::format_number(t) + " for '" + who +
                        "' is not after the previous record");
    }
    if (!keys.empty() && t - keys.back().t_s > kGapWarningS) {
      truth.warnings.push_back("gap of " + container::format_number(t - keys.back().t_s) +
                               " s in '" + who + "' before t = " + container::format_number(t) +
                               " s; interpolating");
    }
    keys.push_back({t, angles::wrap180(az)});
  };

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string tok; ls >> tok;) f.push_back(tok);
    if (f.empty()) continue;
    const std::string where = "pose/vad line " + std::to_string(lineno);
    if (f[0] == "duration") {
      if (f.size() != 2) throw FormatError(where + ": expected 'duration <s>'");
      duration = parse_double(f[1], lineno, "duration");
      if (*duration < 0.0) throw FormatError(where + ": negative duration");
    } else if (f[0] == "vad") {
      if (f.size() != 4) throw FormatError(where + ": expected 'vad <id> <start> <end>'");
      const double s = parse_double(f[2], lineno, "start time");
      const double e = parse_double(f[3], lineno, "end time");
      if (e < s) throw FormatError(where + ": span ends before it starts");
      speaker(f[1]).spans.push_back({s, e});
      latest = std::max(latest, e);
    } else if (f.size() < 3) {
      throw FormatError(where + ": too few fields");
    } else if (f[1] == "array") {
      if (f.size() != 3 && f.size() != 4) throw FormatError(where + ": expected '<t> array <yaw>'");
      const double t = parse_double(f[0], lineno, "time");
      push_key(yaw, "array", t, parse_double(f[2], lineno, "yaw"), lineno);
      latest = std::max(latest, t);
    } else {
      if (f.size() != 4) {
        throw FormatError(where + ": expected '<t> <speaker> <azimuth> <active>'");
      }
      const double t = parse_double(f[0], lineno, "time");
      const double az = parse_double(f[2], lineno, "azimuth");
      if (f[3] != "0" && f[3] != "1") throw FormatError(where + ": active flag must be 0 or 1");
      auto& sp = speaker(f[1]);
      push_key(sp.keys, f[1], t, az, lineno);
      sp.flags.emplace_back(t, f[3] == "1");
      latest = std::max(latest, t);
    }
  }

  truth.duration_s = duration.value_or(latest);
  if (!yaw.empty()) truth.array_yaw = Trajectory(std::move(yaw));
  for (const auto& id : order) {
    auto& sp = pending[id];
    SpeakerTrack track;
    track.id = id;
    if (!sp.keys.empty()) track.azimuth = Trajectory(std::move(sp.keys));
    // An active flag holds until the speaker's next record.
    for (std::size_t i = 0; i < sp.flags.size(); ++i) {
      if (!sp.flags[i].second) continue;
      const double end =
          i + 1 < sp.flags.size() ? sp.flags[i + 1].first : std::max(truth.duration_s, sp.flags[i].first);
      sp.spans.push_back({sp.flags[i].first, end});
    }
    track.activity = merge_spans(std::move(sp.spans));
    truth.speakers.push_back(std::move(track));
  }
  return truth;
}

GroundTruth parse_pose_vad(const std::vector<std::filesystem::path>& paths) {
  std::string text;
  for (const auto& p : paths) {
    auto in = container::open_input(p);
    text.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    text.push_back('\n');
  }
  return parse_pose_vad_text(text);
}

std::string format_pose_vad(const GroundTruth& truth) {
  std::string out = "duration " + container::format_number(truth.duration_s) + '\n';
  if (truth.array_yaw) {
    for (const auto& k : truth.array_yaw->keyframes()) {
      out += container::format_number(k.t_s) + " array " +
             container::format_number(k.azimuth_deg) + '\n';
    }
  }
  for (const auto& s : truth.speakers) {
    for (const auto& k : s.azimuth.keyframes()) {
      // Flags are informational here; the vad spans below are authoritative.
      out += container::format_number(k.t_s) + ' ' + s.id + ' ' +
             container::format_number(k.azimuth_deg) + " 0\n";
    }
    for (const auto& span : s.activity) {
      out += "vad " + s.id + ' ' + container::format_number(span.start_s) + ' ' +
             container::format_number(span.end_s) + '\n';
    }
  }
  return out;
}

void write_pose_vad(const GroundTruth& truth, const std::filesystem::path& path) {
  auto out = container::open_output(path);
  out << format_pose_vad(truth);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lsdd
