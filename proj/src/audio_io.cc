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

#include "sanon/audio_io.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "sanon/csv.h"
#include "sanon/error.h"

namespace sanon {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<uint8_t>* out, uint16_t v) {
  out->push_back(v & 0xFF);
  out->push_back(v >> 8);
}

void PutU32(std::vector<uint8_t>* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back((v >> (8 * i)) & 0xFF);
}

void PutTag(std::vector<uint8_t>* out, const char* tag) {
  out->insert(out->end(), tag, tag + 4);
}

// Zeroth-order modified Bessel function of the first kind (power series).
double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace

AudioBuffer ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, fmt::format("cannot open {}", path.string()));
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const auto format_error = [&](const std::string& what) {
    Fail(ErrorKind::kFormat, fmt::format("{}: {}", path.string(), what));
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    format_error("not a RIFF/WAVE file");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const uint32_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) {
        format_error("truncated fmt chunk");
      }
      format = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) format_error("truncated WAVE_FORMAT_EXTENSIBLE header");
        // First two bytes of the sub-format GUID carry the actual tag.
        format = ReadU16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      // Streamed writers may leave the size unset; clamp to what is present.
      data_size = std::min<size_t>(size, bytes.size() - body);
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) format_error("missing fmt chunk");
  if (data == nullptr) format_error("missing data chunk");
  if (channels == 0 || rate == 0) format_error("invalid channel count or rate");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    Fail(ErrorKind::kUnsupported,
         fmt::format("{}: unsupported encoding (format {}, {} bits)",
                     path.string(), format, bits));
  }
  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t frames = data_size / frame_bytes;

  AudioBuffer buffer;
  buffer.sample_rate_hz = static_cast<int>(rate);
  buffer.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const uint8_t* p = data + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        acc += static_cast<int16_t>(ReadU16(p)) / 32768.0;
      } else {
        const uint32_t raw = ReadU32(p);
        float f;
        std::memcpy(&f, &raw, sizeof(f));
        acc += f;
      }
    }
    buffer.samples[i] = acc / channels;
  }
  return buffer;
}

WavWriteStats WriteWav(const AudioBuffer& buffer,
                       const std::filesystem::path& path) {
  Require(!buffer.empty(), "WriteWav: empty buffer");
  Require(buffer.sample_rate_hz > 0, "WriteWav: invalid sample rate");
  WavWriteStats stats;
  const uint32_t data_bytes = static_cast<uint32_t>(buffer.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(&out, "RIFF");
  PutU32(&out, 36 + data_bytes);
  PutTag(&out, "WAVE");
  PutTag(&out, "fmt ");
  PutU32(&out, 16);
  PutU16(&out, kFormatPcm);
  PutU16(&out, 1);
  PutU32(&out, static_cast<uint32_t>(buffer.sample_rate_hz));
  PutU32(&out, static_cast<uint32_t>(buffer.sample_rate_hz) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  PutTag(&out, "data");
  PutU32(&out, data_bytes);
  for (double x : buffer.samples) {
    if (!(x >= -1.0 && x <= 1.0)) {
      ++stats.clipped_samples;
      x = std::isnan(x) ? 0.0 : std::clamp(x, -1.0, 1.0);
    }
    const long q = std::clamp(std::lround(x * 32768.0), -32768L, 32767L);
    PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) Fail(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) Fail(ErrorKind::kIo, fmt::format("write failed: {}", path.string()));
  return stats;
}

AudioBuffer Resample(const AudioBuffer& buffer, int target_rate_hz) {
  Require(buffer.sample_rate_hz >= 8000 && target_rate_hz >= 8000,
          "Resample: rates must be >= 8000 Hz");
  if (buffer.sample_rate_hz == target_rate_hz) return buffer;

  constexpr int kTaps = 64;
  constexpr int kHalf = kTaps / 2;
  constexpr double kBeta = 8.6;
  constexpr double kRolloff = 0.94;

  const int g = std::gcd(buffer.sample_rate_hz, target_rate_hz);
  const int64_t up = target_rate_hz / g;
  const int64_t down = buffer.sample_rate_hz / g;
  // Normalized cutoff relative to the input Nyquist.
  const double cutoff = kRolloff * std::min(1.0, static_cast<double>(up) / down);

  // Phase p holds taps for an output instant p/up samples past an input
  // sample. Each phase is normalized to unit DC gain.
  std::vector<double> table(static_cast<size_t>(up) * kTaps);
  const double i0_beta = BesselI0(kBeta);
  for (int64_t p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    double sum = 0.0;
    for (int j = 0; j < kTaps; ++j) {
      const double d = frac - (j - kHalf + 1);
      const double x = cutoff * d;
      const double sinc =
          std::abs(x) < 1e-12 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
      const double r = d / kHalf;
      const double w =
          std::abs(r) >= 1.0 ? 0.0 : BesselI0(kBeta * std::sqrt(1 - r * r)) / i0_beta;
      table[p * kTaps + j] = sinc * w;
      sum += sinc * w;
    }
    for (int j = 0; j < kTaps; ++j) table[p * kTaps + j] /= sum;
  }

  const int64_t n_in = static_cast<int64_t>(buffer.size());
  const int64_t n_out = (n_in * up + down / 2) / down;
  AudioBuffer out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(static_cast<size_t>(n_out));
  for (int64_t m = 0; m < n_out; ++m) {
    const int64_t pos = m * down;
    const int64_t base = pos / up;
    const int64_t phase = pos % up;
    const double* taps = &table[phase * kTaps];
    double acc = 0.0;
    for (int j = 0; j < kTaps; ++j) {
      const int64_t idx = base + j - kHalf + 1;
      if (idx >= 0 && idx < n_in) acc += taps[j] * buffer.samples[idx];
    }
    out.samples[m] = acc;
  }
  return out;
}

DatasetManifest LoadManifest(const std::filesystem::path& path,
                             const std::filesystem::path& root_dir) {
  const CsvDocument doc = ReadCsv(path);
  if (JoinCsv(doc.header) != kManifestHeader) {
    Fail(ErrorKind::kSchema,
         fmt::format("{}: header must be exactly '{}', got '{}'",
                     path.string(), kManifestHeader, JoinCsv(doc.header)));
  }
  DatasetManifest manifest;
  manifest.root_dir = root_dir;
  std::unordered_set<std::string> seen;
  for (const auto& row : doc.rows) {
    if (row.fields.size() != 3) {
      Fail(ErrorKind::kSchema,
           fmt::format("{}:{}: expected 3 columns, got {}", path.string(),
                       row.line, row.fields.size()));
    }
    UtteranceRecord rec{row.fields[0], row.fields[1], row.fields[2]};
    if (rec.utt_id.empty() || rec.speaker_id.empty() ||
        rec.audio_path.empty()) {
      Fail(ErrorKind::kValidation,
           fmt::format("{}:{}: empty field", path.string(), row.line));
    }
    if (!seen.insert(rec.utt_id).second) {
      Fail(ErrorKind::kValidation,
           fmt::format("{}:{}: duplicate utt_id '{}'", path.string(), row.line,
                       rec.utt_id));
    }
    manifest.records.push_back(std::move(rec));
  }
  if (manifest.records.empty()) {
    manifest.warnings.push_back(
        fmt::format("{}: manifest has no utterances", path.string()));
  }
  return manifest;
}

void WriteManifest(const std::vector<UtteranceRecord>& records,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  out << kManifestHeader << '\n';
  for (const auto& r : records) {
    out << r.utt_id << ',' << r.speaker_id << ',' << r.audio_path << '\n';
  }
  if (!out) Fail(ErrorKind::kIo, fmt::format("write failed: {}", path.string()));
}

}  // namespace sanon
