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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsdd/scene.hpp"
#include "lsdd/stft.hpp"
#include "lsdd/timeline.hpp"

namespace lsdd {

struct AudioData {
  std::vector<std::vector<double>> channels;  // [M][N]
  double sample_rate_hz = 0.0;
};

// PCM 16/24/32-bit or float32 RIFF/WAVE. 48 kHz input is low-passed and
// decimated by 3; any rate other than 16 or 48 kHz is a FormatError.
AudioData ingest_wav(const std::filesystem::path& path,
                     std::optional<std::size_t> expected_channels = std::nullopt);
AudioData decode_wav(const std::string& bytes,
                     std::optional<std::size_t> expected_channels = std::nullopt);
void write_wav(const std::filesystem::path& path, const AudioData& audio);

// 3:1 decimation with a zero-phase windowed-sinc anti-alias filter.
std::vector<double> decimate_by_3(const std::vector<double>& x);
std::vector<double> decimation_filter();

void save_stft_tensor(const StftTensor& tensor, const std::filesystem::path& path);
StftTensor load_stft_tensor(const std::filesystem::path& path);

// Records, one per line, '#' starts a comment:
//   <time_s> <speaker_id> <azimuth_deg> <active 0|1>
//   <time_s> array <yaw_deg>
//   vad <speaker_id> <start_s> <end_s>
//   duration <seconds>
GroundTruth parse_pose_vad(const std::vector<std::filesystem::path>& paths);
GroundTruth parse_pose_vad_text(const std::string& text);
std::string format_pose_vad(const GroundTruth& truth);
void write_pose_vad(const GroundTruth& truth, const std::filesystem::path& path);

}  // namespace lsdd
