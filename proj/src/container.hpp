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

#pragma once

// Shared helpers for the text-header + little-endian payload containers
// (steering sets, UDM caches, STFT tensors).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace lsdd::container {

std::string format_number(double v);
std::string join_numbers(std::span<const double> values);

std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

// Reads one header line; returns it with the leading key split off into
// `key`. Throws FormatError at end of stream.
std::string read_field(std::istream& in, std::string& key);
// Reads a field and checks its key.
std::string expect_field(std::istream& in, const std::string& key);

std::size_t parse_count(const std::string& text, const std::string& what);
std::vector<double> parse_numbers(const std::string& text,
                                  const std::string& what);

void write_f32(std::ostream& out, float v);
void write_f32_block(std::ostream& out, std::span<const float> values);
// Reads exactly `count` floats; throws FormatError naming `what` if the
// payload is short, or if trailing bytes remain after it.
std::vector<float> read_f32_payload(std::istream& in, std::size_t count,
                                    const std::string& what);

}  // namespace lsdd::container
