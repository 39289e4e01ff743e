// Copyright (c) 2026 The sanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SANON_AUDIO_IO_H_
#define SANON_AUDIO_IO_H_

#include <filesystem>
#include <string>
#include <vector>

namespace sanon {

// Rate every anonymizer works at.
inline constexpr int kWorkingRateHz = 16000;

struct AudioBuffer {
  std::vector<double> samples;  // nominally within [-1, 1]
  int sample_rate_hz = kWorkingRateHz;

  bool empty() const { return samples.empty(); }
  size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Reads RIFF/WAVE with 16-bit PCM or 32-bit IEEE float data (plain or
// WAVE_FORMAT_EXTENSIBLE). Channels are averaged to mono; 16-bit samples are
// scaled by 1/32768.
AudioBuffer ReadWav(const std::filesystem::path& path);

struct WavWriteStats {
  size_t clipped_samples = 0;
};

// Writes 16-bit PCM mono. Samples outside [-1, 1] are hard-clipped and
// counted.
WavWriteStats WriteWav(const AudioBuffer& buffer,
                       const std::filesystem::path& path);

// Polyphase windowed-sinc resampler (Kaiser window, 64 taps per phase).
// Returns the input unchanged when the rates already match.
AudioBuffer Resample(const AudioBuffer& buffer, int target_rate_hz);

struct UtteranceRecord {
  std::string utt_id;
  std::string speaker_id;
  std::string audio_path;  // POSIX-style, relative to the manifest root

  bool operator==(const UtteranceRecord&) const = default;
};

struct DatasetManifest {
  std::vector<UtteranceRecord> records;
  std::filesystem::path root_dir;
  std::vector<std::string> warnings;

  std::filesystem::path ResolvePath(const UtteranceRecord& record) const {
    return root_dir / record.audio_path;
  }
};

inline constexpr const char* kManifestHeader = "utt_id,speaker_id,audio_path";

// Parses the manifest CSV (header exactly `utt_id,speaker_id,audio_path`).
DatasetManifest LoadManifest(const std::filesystem::path& path,
                             const std::filesystem::path& root_dir);
void WriteManifest(const std::vector<UtteranceRecord>& records,
                   const std::filesystem::path& path);

}  // namespace sanon

#endif  // SANON_AUDIO_IO_H_
