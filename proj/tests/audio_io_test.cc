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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sanon/fft.h"
#include "support/expect_error.h"
#include "support/synth.h"

namespace sanon {
namespace {

namespace fs = std::filesystem;

void PutU16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>(v >> 8));
}
void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

// Canonical RIFF/WAVE bytes assembled by hand.
std::string WavBytes(uint16_t format, uint16_t channels, uint32_t rate,
                     uint16_t bits, const std::string& data) {
  std::string fmt_chunk;
  PutU16(&fmt_chunk, format);
  PutU16(&fmt_chunk, channels);
  PutU32(&fmt_chunk, rate);
  PutU32(&fmt_chunk, rate * channels * bits / 8);
  PutU16(&fmt_chunk, channels * bits / 8);
  PutU16(&fmt_chunk, bits);
  std::string body = "WAVEfmt ";
  PutU32(&body, static_cast<uint32_t>(fmt_chunk.size()));
  body += fmt_chunk + "data";
  PutU32(&body, static_cast<uint32_t>(data.size()));
  body += data;
  std::string out = "RIFF";
  PutU32(&out, static_cast<uint32_t>(body.size()));
  return out + body;
}

std::string Pcm16(const std::vector<int16_t>& samples) {
  std::string data;
  for (int16_t s : samples) PutU16(&data, static_cast<uint16_t>(s));
  return data;
}

void WriteBytes(const fs::path& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

class AudioIoTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testing::MakeTempDir("audio_io"); }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(AudioIoTest, ReadsPcm16WithLinearScaling) {
  WriteBytes(dir_ / "a.wav", WavBytes(1, 1, 16000, 16, Pcm16({0, 16384, -16384})));
  const AudioBuffer b = ReadWav(dir_ / "a.wav");
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.sample_rate_hz, 16000);
  EXPECT_NEAR(b.samples[0], 0.0, 1.0 / 32768);
  EXPECT_NEAR(b.samples[1], 0.5, 1.0 / 32768);
  EXPECT_NEAR(b.samples[2], -0.5, 1.0 / 32768);
}

TEST_F(AudioIoTest, AveragesChannelsToMono) {
  WriteBytes(dir_ / "st.wav", WavBytes(1, 2, 16000, 16, Pcm16({32767, 0})));
  const AudioBuffer b = ReadWav(dir_ / "st.wav");
  ASSERT_EQ(b.size(), 1u);
  EXPECT_NEAR(b.samples[0], 0.5, 1.0 / 32768);
}

TEST_F(AudioIoTest, ReadsFloat32) {
  std::string data;
  for (float f : {0.25f, -0.75f}) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    PutU32(&data, bits);
  }
  WriteBytes(dir_ / "f.wav", WavBytes(3, 1, 22050, 32, data));
  const AudioBuffer b = ReadWav(dir_ / "f.wav");
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.sample_rate_hz, 22050);
  EXPECT_DOUBLE_EQ(b.samples[0], 0.25);
  EXPECT_DOUBLE_EQ(b.samples[1], -0.75);
}

TEST_F(AudioIoTest, TruncatedHeaderIsFormatError) {
  const std::string full = WavBytes(1, 1, 16000, 16, Pcm16({1, 2, 3}));
  WriteBytes(dir_ / "t.wav", full.substr(0, 20));
  EXPECT_SANON_ERROR(ReadWav(dir_ / "t.wav"), ErrorKind::kFormat);
}

TEST_F(AudioIoTest, NotRiffIsFormatError) {
  WriteBytes(dir_ / "x.wav", std::string(64, 'x'));
  EXPECT_SANON_ERROR(ReadWav(dir_ / "x.wav"), ErrorKind::kFormat);
}

TEST_F(AudioIoTest, UnsupportedEncodingIsReported) {
  WriteBytes(dir_ / "u8.wav", WavBytes(1, 1, 16000, 8, std::string(4, '\x80')));
  EXPECT_SANON_ERROR(ReadWav(dir_ / "u8.wav"), ErrorKind::kUnsupported);
  WriteBytes(dir_ / "alaw.wav", WavBytes(6, 1, 8000, 8, std::string(4, 'a')));
  EXPECT_SANON_ERROR(ReadWav(dir_ / "alaw.wav"), ErrorKind::kUnsupported);
}

TEST_F(AudioIoTest, MissingFileIsIoError) {
  EXPECT_SANON_ERROR(ReadWav(dir_ / "absent.wav"), ErrorKind::kIo);
}

TEST_F(AudioIoTest, RoundTripWithinOneQuantizationStep) {
  AudioBuffer in{{0.25, -0.25}, 16000};
  WriteWav(in, dir_ / "r.wav");
  const AudioBuffer out = ReadWav(dir_ / "r.wav");
  ASSERT_EQ(out.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(out.samples[i], in.samples[i], 1.0 / 32768);
  }
}

TEST_F(AudioIoTest, RoundTripPropertyOnRandomSignal) {
  const AudioBuffer in = testing::SynthesizeUtterance(
      testing::MakeSpeakers(1, 3).front(), 0.5, 11);
  WriteWav(in, dir_ / "p.wav");
  const AudioBuffer out = ReadWav(dir_ / "p.wav");
  ASSERT_EQ(out.size(), in.size());
  double worst = 0.0;
  for (size_t i = 0; i < in.size(); ++i) {
    worst = std::max(worst, std::abs(out.samples[i] - in.samples[i]));
  }
  EXPECT_LE(worst, 1.0 / 32768);
}

TEST_F(AudioIoTest, ClipsOutOfRangeSamplesAndCounts) {
  const auto stats = WriteWav(AudioBuffer{{1.5, 0.0, -2.0}, 16000}, dir_ / "c.wav");
  EXPECT_EQ(stats.clipped_samples, 2u);
  const AudioBuffer out = ReadWav(dir_ / "c.wav");
  EXPECT_NEAR(out.samples[0], 1.0, 1.0 / 32768);
  EXPECT_NEAR(out.samples[2], -1.0, 1.0 / 32768);
}

TEST_F(AudioIoTest, EmptyBufferIsPreconditionError) {
  EXPECT_SANON_ERROR(WriteWav(AudioBuffer{}, dir_ / "e.wav"),
                     ErrorKind::kPrecondition);
}

TEST(ResampleTest, SameRateIsIdentity) {
  const AudioBuffer in = testing::SineTone(440.0, 0.1);
  const AudioBuffer out = Resample(in, 16000);
  EXPECT_EQ(out.samples, in.samples);
}

TEST(ResampleTest, DownsampledSineKeepsItsFrequency) {
  AudioBuffer in;
  in.sample_rate_hz = 48000;
  in.samples.resize(48000);
  for (size_t i = 0; i < in.size(); ++i) {
    in.samples[i] = 0.5 * std::sin(2 * std::numbers::pi * 1000.0 * i / 48000);
  }
  const AudioBuffer out = Resample(in, 16000);
  EXPECT_EQ(out.sample_rate_hz, 16000);
  EXPECT_EQ(out.size(), 16000u);
  RealFft fft(16000);
  const auto power = fft.PowerSpectrum(out.samples);
  const size_t peak =
      std::max_element(power.begin(), power.end()) - power.begin();
  EXPECT_EQ(peak, 1000u);  // 1 Hz per bin
}

TEST(ResampleTest, UpDownRoundTripPreservesLength) {
  const AudioBuffer in = testing::SineTone(300.0, 0.5);
  const AudioBuffer up = Resample(in, 32000);
  const AudioBuffer back = Resample(up, 16000);
  EXPECT_NEAR(static_cast<double>(back.size()), 8000.0, 1.0);
}

TEST(ResampleTest, DurationPreservedWithinOneSample) {
  for (int rate : {8000, 11025, 22050, 44100, 48000}) {
    AudioBuffer in;
    in.sample_rate_hz = rate;
    in.samples.assign(static_cast<size_t>(rate * 0.37), 0.1);
    const AudioBuffer out = Resample(in, 16000);
    EXPECT_NEAR(out.duration_seconds(), in.duration_seconds(), 1.0 / 16000)
        << rate;
  }
}

TEST(ResampleTest, InBandToneSurvivesRateConversion) {
  // 440 Hz through 16k -> 44.1k -> 16k stays close to the original.
  const AudioBuffer in = testing::SineTone(440.0, 0.5);
  const AudioBuffer back = Resample(Resample(in, 44100), 16000);
  ASSERT_EQ(back.size(), in.size());
  double err = 0, sig = 0;
  for (size_t i = 200; i + 200 < in.size(); ++i) {
    err += std::pow(back.samples[i] - in.samples[i], 2);
    sig += std::pow(in.samples[i], 2);
  }
  EXPECT_GT(10 * std::log10(sig / err), 40.0);
}

class ManifestTest : public AudioIoTest {
 protected:
  fs::path Write(const std::string& text) {
    const fs::path p = dir_ / "manifest.csv";
    std::ofstream(p) << text;
    return p;
  }
};

TEST_F(ManifestTest, LoadsValidRows) {
  const auto p = Write("utt_id,speaker_id,audio_path\nu1,s1,a/u1.wav\nu2,s2,b/u2.wav\n");
  const DatasetManifest m = LoadManifest(p, dir_);
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_EQ(m.records[1], (UtteranceRecord{"u2", "s2", "b/u2.wav"}));
  EXPECT_EQ(m.ResolvePath(m.records[0]), dir_ / "a/u1.wav");
  EXPECT_TRUE(m.warnings.empty());
}

TEST_F(ManifestTest, DuplicateUttIdNamesTheId) {
  const auto p = Write("utt_id,speaker_id,audio_path\ndup7,s1,a.wav\ndup7,s2,b.wav\n");
  try {
    LoadManifest(p, dir_);
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("dup7"), std::string::npos);
  }
}

TEST_F(ManifestTest, HeaderOnlyIsEmptyWithWarning) {
  const DatasetManifest m =
      LoadManifest(Write("utt_id,speaker_id,audio_path\n"), dir_);
  EXPECT_TRUE(m.records.empty());
  EXPECT_FALSE(m.warnings.empty());
}

TEST_F(ManifestTest, WrongHeaderIsSchemaError) {
  EXPECT_SANON_ERROR(LoadManifest(Write("id,speaker,path\nu,s,p\n"), dir_),
                     ErrorKind::kSchema);
}

TEST_F(ManifestTest, WrongColumnCountIsSchemaError) {
  EXPECT_SANON_ERROR(
      LoadManifest(Write("utt_id,speaker_id,audio_path\nu1,s1\n"), dir_),
      ErrorKind::kSchema);
}

TEST_F(ManifestTest, WriteThenLoadRoundTrips) {
  const std::vector<UtteranceRecord> records = {{"b", "s2", "x/b.wav"},
                                                {"a", "s1", "x/a.wav"}};
  WriteManifest(records, dir_ / "out.csv");
  EXPECT_EQ(LoadManifest(dir_ / "out.csv", dir_).records, records);
}

}  // namespace
}  // namespace sanon
