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

#include "sanon/embeddings.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "sanon/csv.h"
#include "sanon/dsp_core.h"
#include "sanon/error.h"
#include "sanon/fft.h"
#include "sanon/vocoder.h"

namespace sanon {

SpeakerEmbedding::SpeakerEmbedding(std::vector<float> values)
    : values_(std::move(values)) {
  if (values_.empty()) Fail(ErrorKind::kValidation, "embedding is empty");
  double sum = 0.0;
  for (float v : values_) {
    if (!std::isfinite(v)) {
      Fail(ErrorKind::kValidation, "embedding has a non-finite value");
    }
    sum += static_cast<double>(v) * v;
  }
  norm_ = std::sqrt(sum);
  if (!(norm_ > 0.0)) Fail(ErrorKind::kValidation, "embedding has zero norm");
}

SpeakerEmbedding SpeakerEmbedding::FromDoubles(std::span<const double> values) {
  return SpeakerEmbedding(std::vector<float>(values.begin(), values.end()));
}

double CosineSimilarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  if (a.dimension() != b.dimension()) {
    Fail(ErrorKind::kValidation,
         fmt::format("cosine similarity: dimensions {} and {} differ",
                     a.dimension(), b.dimension()));
  }
  if (!(a.norm() > 0.0) || !(b.norm() > 0.0)) {
    Fail(ErrorKind::kValidation, "cosine similarity: zero vector");
  }
  double dot = 0.0;
  for (size_t i = 0; i < a.dimension(); ++i) {
    dot += static_cast<double>(a.values()[i]) * b.values()[i];
  }
  return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

void EmbeddingPool::Add(std::string id, SpeakerEmbedding embedding) {
  if (entries_.empty()) {
    dimension_ = embedding.dimension();
  } else if (embedding.dimension() != dimension_) {
    Fail(ErrorKind::kValidation,
         fmt::format("pool entry '{}' has dimension {}, pool has {}", id,
                     embedding.dimension(), dimension_));
  }
  for (const auto& e : entries_) {
    if (e.id == id) {
      Fail(ErrorKind::kValidation, fmt::format("duplicate pool id '{}'", id));
    }
  }
  entries_.push_back({std::move(id), std::move(embedding)});
}

void UtteranceEmbeddingSet::Add(std::string utt_id, std::string speaker_id,
                                SpeakerEmbedding embedding) {
  if (!items_.empty() &&
      embedding.dimension() != items_.front().embedding.dimension()) {
    Fail(ErrorKind::kValidation,
         fmt::format("utterance '{}' has dimension {}, set has {}", utt_id,
                     embedding.dimension(),
                     items_.front().embedding.dimension()));
  }
  auto it = std::lower_bound(
      index_.begin(), index_.end(), utt_id,
      [](const auto& entry, const std::string& key) { return entry.first < key; });
  if (it != index_.end() && it->first == utt_id) {
    Fail(ErrorKind::kValidation, fmt::format("duplicate utt_id '{}'", utt_id));
  }
  index_.insert(it, {utt_id, items_.size()});
  items_.push_back({std::move(utt_id), std::move(speaker_id),
                    std::move(embedding)});
}

const UtteranceEmbedding* UtteranceEmbeddingSet::Find(
    const std::string& utt_id) const {
  auto it = std::lower_bound(
      index_.begin(), index_.end(), utt_id,
      [](const auto& entry, const std::string& key) { return entry.first < key; });
  if (it == index_.end() || it->first != utt_id) return nullptr;
  return &items_[it->second];
}

namespace {

void PutU16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xFF));
  out->push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
 public:
  ByteReader(const std::string& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  uint32_t U(int width) {
    Need(width);
    uint32_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += width;
    return v;
  }

  std::string Bytes(size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(size_t n) {
    if (pos_ + n > bytes_.size()) {
      Fail(ErrorKind::kFormat,
           fmt::format("{}: truncated SAEB file", path_.string()));
    }
  }

  const std::string& bytes_;
  const std::filesystem::path& path_;
  size_t pos_ = 0;
};

EmbeddingPool LoadPoolCsv(const std::filesystem::path& path) {
  const CsvDocument doc = ReadCsv(path);
  std::vector<CsvRow> rows = doc.rows;
  // ReadCsv always treats the first line as a header; put it back when it is
  // actually data.
  if (doc.header.empty() || doc.header[0] != "id") {
    rows.insert(rows.begin(), CsvRow{1, doc.header});
  }
  EmbeddingPool pool;
  size_t columns = 0;
  for (const auto& row : rows) {
    if (columns == 0) columns = row.fields.size();
    if (row.fields.size() != columns || columns < 2) {
      Fail(ErrorKind::kValidation,
           fmt::format("{}:{}: expected {} columns, got {}", path.string(),
                       row.line, columns, row.fields.size()));
    }
    std::vector<float> values(columns - 1);
    for (size_t c = 1; c < columns; ++c) {
      double v;
      if (!ParseDouble(row.fields[c], &v)) {
        Fail(ErrorKind::kValidation,
             fmt::format("{}:{}: non-numeric value '{}'", path.string(),
                         row.line, row.fields[c]));
      }
      values[c - 1] = static_cast<float>(v);
    }
    pool.Add(row.fields[0], SpeakerEmbedding(std::move(values)));
  }
  if (pool.empty()) {
    pool.warnings().push_back(fmt::format("{}: empty pool", path.string()));
  }
  return pool;
}

}  // namespace

void SavePool(const EmbeddingPool& pool, const std::filesystem::path& path) {
  std::string out = "SAEB";
  PutU16(&out, kSaebVersion);
  PutU32(&out, static_cast<uint32_t>(pool.dimension()));
  PutU32(&out, static_cast<uint32_t>(pool.size()));
  for (const auto& entry : pool.entries()) {
    if (entry.id.size() > 0xFFFF) {
      Fail(ErrorKind::kValidation, "pool id longer than 65535 bytes");
    }
    PutU16(&out, static_cast<uint16_t>(entry.id.size()));
    out += entry.id;
    for (float v : entry.embedding.values()) {
      uint32_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      PutU32(&out, bits);
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) Fail(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) Fail(ErrorKind::kIo, fmt::format("write failed: {}", path.string()));
}

EmbeddingPool LoadPool(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) Fail(ErrorKind::kIo, fmt::format("cannot open {}", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(file)),
                          std::istreambuf_iterator<char>());
  if (bytes.empty()) {
    EmbeddingPool pool;
    pool.warnings().push_back(fmt::format("{}: empty pool", path.string()));
    return pool;
  }
  if (bytes.rfind("SAEB", 0) != 0) return LoadPoolCsv(path);

  ByteReader reader(bytes, path);
  reader.Bytes(4);
  const uint32_t version = reader.U(2);
  if (version != kSaebVersion) {
    Fail(ErrorKind::kUnsupported,
         fmt::format("{}: SAEB version {} not supported", path.string(),
                     version));
  }
  const uint32_t dimension = reader.U(4);
  const uint32_t count = reader.U(4);
  EmbeddingPool pool;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t id_len = reader.U(2);
    std::string id = reader.Bytes(id_len);
    std::vector<float> values(dimension);
    for (uint32_t d = 0; d < dimension; ++d) {
      const uint32_t bits = reader.U(4);
      std::memcpy(&values[d], &bits, sizeof(bits));
    }
    pool.Add(std::move(id), SpeakerEmbedding(std::move(values)));
  }
  if (!reader.AtEnd()) {
    Fail(ErrorKind::kValidation,
         fmt::format("{}: trailing bytes after {} entries of dimension {}",
                     path.string(), count, dimension));
  }
  if (pool.empty()) {
    pool.warnings().push_back(fmt::format("{}: empty pool", path.string()));
  }
  return pool;
}

namespace {

constexpr int kMelBands = 40;
constexpr int kFftSize = 512;
constexpr double kMelLowHz = 20.0;
constexpr double kMelHighHz = 7600.0;
// Frames more than this far below the loudest frame are ignored.
constexpr double kEnergyFloorDb = 40.0;
constexpr double kPreEmphasis = 0.97;
constexpr double kLifter = 22.0;
constexpr double kF0ReferenceHz = 150.0;
constexpr double kLogF0Scale = 10.0;

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filters on the HTK mel scale, one row per band.
std::vector<std::vector<double>> MelFilterbank(int sample_rate) {
  const int bins = kFftSize / 2 + 1;
  std::vector<double> edges(kMelBands + 2);
  const double lo = HzToMel(kMelLowHz), hi = HzToMel(kMelHighHz);
  for (int i = 0; i < kMelBands + 2; ++i) {
    edges[i] = MelToHz(lo + (hi - lo) * i / (kMelBands + 1));
  }
  std::vector<std::vector<double>> bank(kMelBands, std::vector<double>(bins, 0.0));
  for (int b = 0; b < kMelBands; ++b) {
    for (int k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * sample_rate / kFftSize;
      if (hz > edges[b] && hz < edges[b + 2]) {
        bank[b][k] = hz <= edges[b + 1]
                         ? (hz - edges[b]) / (edges[b + 1] - edges[b])
                         : (edges[b + 2] - hz) / (edges[b + 2] - edges[b + 1]);
      }
    }
  }
  return bank;
}

void MeanStd(const std::vector<double>& v, double* mean, double* stddev) {
  if (v.empty()) {
    *mean = *stddev = 0.0;
    return;
  }
  double sum = 0.0;
  for (double x : v) sum += x;
  *mean = sum / v.size();
  double var = 0.0;
  for (double x : v) var += (x - *mean) * (x - *mean);
  *stddev = std::sqrt(var / v.size());
}

}  // namespace

SpeakerEmbedding ExtractBaselineEmbedding(const AudioBuffer& buffer) {
  if (buffer.sample_rate_hz != kWorkingRateHz) {
    Fail(ErrorKind::kValidation, "baseline embedding expects 16 kHz audio");
  }
  if (buffer.duration_seconds() < 0.5) {
    Fail(ErrorKind::kValidation,
         fmt::format("baseline embedding needs >= 0.5 s of audio, got {:.3f} s",
                     buffer.duration_seconds()));
  }
  AudioBuffer emphasized = buffer;
  for (size_t i = emphasized.size(); i-- > 1;) {
    emphasized.samples[i] -= kPreEmphasis * emphasized.samples[i - 1];
  }
  const FrameSequence frames =
      FrameSignal(emphasized, 25.0, 10.0, WindowType::kHann);
  const auto bank = MelFilterbank(buffer.sample_rate_hz);
  RealFft fft(kFftSize);

  std::vector<double> frame_energy(frames.frames.size());
  std::vector<std::vector<double>> log_mel(frames.frames.size(),
                                           std::vector<double>(kMelBands));
  for (size_t i = 0; i < frames.frames.size(); ++i) {
    const auto power = fft.PowerSpectrum(frames.frames[i]);
    double energy = 0.0;
    for (double p : power) energy += p;
    frame_energy[i] = energy;
    for (int b = 0; b < kMelBands; ++b) {
      double acc = 0.0;
      for (size_t k = 0; k < power.size(); ++k) acc += bank[b][k] * power[k];
      log_mel[i][b] = std::log(std::max(acc, 1e-10));
    }
  }
  const double max_energy =
      *std::max_element(frame_energy.begin(), frame_energy.end());
  const double floor = max_energy * std::pow(10.0, -kEnergyFloorDb / 10.0);

  // Orthonormal DCT-II; c0 (overall level) is skipped.
  std::vector<std::vector<double>> ceps(kBaselineCepstra);
  for (size_t i = 0; i < frames.frames.size(); ++i) {
    if (!(frame_energy[i] > 0.0) || frame_energy[i] < floor) continue;
    for (int c = 1; c <= kBaselineCepstra; ++c) {
      double acc = 0.0;
      for (int b = 0; b < kMelBands; ++b) {
        acc += log_mel[i][b] * std::cos(M_PI * c * (b + 0.5) / kMelBands);
      }
      const double lifter =
          1.0 + 0.5 * kLifter * std::sin(M_PI * c / kLifter);
      ceps[c - 1].push_back(lifter * acc * std::sqrt(2.0 / kMelBands));
    }
  }

  std::vector<double> features(kBaselineDimension, 0.0);
  for (int c = 0; c < kBaselineCepstra; ++c) {
    MeanStd(ceps[c], &features[c], &features[kBaselineCepstra + c]);
  }
  std::vector<double> log_f0;
  for (const auto& v : EstimateF0(buffer).values) {
    if (v.voiced) log_f0.push_back(kLogF0Scale * std::log(v.f0_hz / kF0ReferenceHz));
  }
  MeanStd(log_f0, &features[2 * kBaselineCepstra],
          &features[2 * kBaselineCepstra + 1]);
  return SpeakerEmbedding::FromDoubles(features);
}

}  // namespace sanon
