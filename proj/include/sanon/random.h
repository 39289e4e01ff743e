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

#ifndef SANON_RANDOM_H_
#define SANON_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace sanon {

uint64_t SplitMix64(uint64_t x);
uint64_t Fnv1a64(std::string_view bytes);

// splitmix64(global_seed ^ fnv1a64(speaker_id "|" scope_key "|" method)).
// scope_key is the utterance id for per-utterance draws and empty otherwise.
uint64_t DeriveSeed(uint64_t global_seed, std::string_view speaker_id,
                    std::string_view scope_key, std::string_view method);

// Portable random source. The std distributions are implementation-defined,
// so every draw here is computed from raw mt19937_64 output to keep results
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double Uniform01();
  double Uniform(double lo, double hi);
  // Uniform integer in [0, n); n > 0.
  uint64_t UniformInt(uint64_t n);
  // Standard normal via Box-Muller.
  double Gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sanon

#endif  // SANON_RANDOM_H_
