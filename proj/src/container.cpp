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

#include "container.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "lsdd/error.hpp"

namespace lsdd::container {

std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_numbers(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_number(values[i]);
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::string read_field(std::istream& in, std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("unexpected end of header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto sp = line.find(' ');
  if (sp == std::string::npos) {
    key = line;
    return {};
  }
  key = line.substr(0, sp);
  return line.substr(sp + 1);
}

std::string expect_field(std::istream& in, const std::string& key) {
  std::string got;
  std::string value = read_field(in, got);
  if (got != key) {
    throw FormatError("malformed header: expected '" + key + "', found '" +
                      got + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::istringstream is(text);
  long long v = -1;
  std::string extra;
  if (!(is >> v) || (is >> extra) || v < 0) {
    throw FormatError("malformed header: bad " + what + " '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> parse_numbers(const std::string& text,
                                  const std::string& what) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw FormatError("malformed header: bad value '" + tok + "' in " +
                        what);
    }
    out.push_back(v);
  }
  return out;
}

namespace {

std::uint32_t to_le(std::uint32_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) |
           ((bits >> 8) & 0xff00u) | (bits >> 24);
  }
  return bits;
}

}  // namespace

void write_f32(std::ostream& out, float v) {
  const std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(v));
  out.write(reinterpret_cast<const char*>(&bits), 4);
}

void write_f32_block(std::ostream& out, std::span<const float> values) {
  for (float v : values) write_f32(out, v);
}

std::vector<float> read_f32_payload(std::istream& in, std::size_t count,
                                    const std::string& what) {
  std::vector<char> raw(count * 4);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got != raw.size()) {
    throw FormatError("dimension mismatch: " + what + " payload holds " +
                      std::to_string(got / 4) + " floats, expected " +
                      std::to_string(count));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("dimension mismatch: " + what +
                      " payload longer than header advertises");
  }
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, raw.data() + 4 * i, 4);
    out[i] = std::bit_cast<float>(to_le(bits));
  }
  return out;
}

}  // namespace lsdd::container
