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

// Synthetic stand-in for a labeled user-generated-content corpus.
//
// Each user draws a topic mixture from a symmetric Dirichlet. Documents mix
// common function words with topic words drawn from that mixture. Public
// topics also occur in a separate public corpus; private topics only occur in
// user text. A user's score is a fixed linear function of the mixture plus
// Gaussian noise, so the score is partly invisible to a model trained on the
// public corpus alone.

#ifndef DPUGC_SYNTHETIC_H_
#define DPUGC_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpugc/utility.h"

namespace dpugc {

struct SyntheticOptions {
  int num_users = 200;
  int docs_per_user = 10;
  int doc_length = 30;
  int num_public_topics = 6;
  int num_private_topics = 4;
  int words_per_topic = 40;
  int num_common_words = 40;
  double common_rate = 0.3;
  double dirichlet_alpha = 0.5;
  int public_docs = 3000;
  double noise_stddev = 0.1;
  std::uint64_t seed = 7;
};

struct SyntheticData {
  LabeledUserSet users;
  // Per user, topic proportions (public topics first).
  std::vector<std::vector<double>> mixtures;
  // Score = coefficients . mixture + noise.
  std::vector<double> coefficients;
  std::vector<std::vector<std::string>> public_docs;
};

SyntheticData GenerateSynthetic(const SyntheticOptions& options);

}  // namespace dpugc

#endif  // DPUGC_SYNTHETIC_H_
