// Copyright 2026 The dpugc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPUGC_RANDOM_H_
#define DPUGC_RANDOM_H_

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace dpugc {

// All randomness flows through this engine so that runs are reproducible
// across platforms (boost distributions are specified, std ones are not).
using Engine = boost::random::mt19937_64;

// Independent streams derived from one user seed. Keeping noise on its own
// stream means a noiseless run consumes exactly the same sampling draws as a
// noisy one.
enum class RngStream : std::uint32_t {
  kInit = 1,
  kPairs = 2,
  kSampling = 3,
  kNoise = 4,
  kSplit = 5,
  kSynthetic = 6,
};

Engine MakeEngine(std::uint64_t seed, RngStream stream);

}  // namespace dpugc

#endif  // DPUGC_RANDOM_H_
