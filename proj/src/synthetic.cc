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

#include "dpugc/synthetic.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "dpugc/random.h"
#include <boost/random/discrete_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace dpugc {
namespace {

std::vector<double> ZipfWeights(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 1.0 / (i + 1);
  return w;
}

class TopicSampler {
 public:
  explicit TopicSampler(const SyntheticOptions& o)
      : options_(o),
        within_(ZipfWeights(o.words_per_topic)),
        common_(ZipfWeights(o.num_common_words)) {}

  std::string TopicWord(int topic, Engine& rng) {
    const int idx = within_(rng);
    if (topic < options_.num_public_topics) {
      return absl::StrCat("pub", topic, "w", idx);
    }
    return absl::StrCat("ugc", topic - options_.num_public_topics, "w", idx);
  }

  std::string CommonWord(Engine& rng) { return absl::StrCat("the", common_(rng)); }

  std::vector<std::string> Document(const std::vector<double>& mixture,
                                    Engine& rng) {
    boost::random::discrete_distribution<int> topic(mixture.begin(), mixture.end());
    boost::random::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::string> doc;
    doc.reserve(options_.doc_length);
    for (int i = 0; i < options_.doc_length; ++i) {
      if (unif(rng) < options_.common_rate) {
        doc.push_back(CommonWord(rng));
      } else {
        doc.push_back(TopicWord(topic(rng), rng));
      }
    }
    return doc;
  }

 private:
  const SyntheticOptions& options_;
  boost::random::discrete_distribution<int> within_;
  boost::random::discrete_distribution<int> common_;
};

std::vector<double> Dirichlet(int n, double alpha, Engine& rng) {
  boost::random::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) {
    x = gamma(rng);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

SyntheticData GenerateSynthetic(const SyntheticOptions& options) {
  Engine rng = MakeEngine(options.seed, RngStream::kSynthetic);
  TopicSampler sampler(options);
  const int topics = options.num_public_topics + options.num_private_topics;

  SyntheticData data;
  // Public topics carry a weak signal, private topics a strong contrast.
  boost::random::uniform_real_distribution<double> weak(-0.5, 0.5);
  for (int t = 0; t < options.num_public_topics; ++t) {
    data.coefficients.push_back(weak(rng));
  }
  for (int t = 0; t < options.num_private_topics; ++t) {
    const double magnitude = 3.0 - 0.5 * (t / 2);
    data.coefficients.push_back(t % 2 == 0 ? magnitude : -magnitude);
  }

  boost::random::normal_distribution<double> noise(0.0, options.noise_stddev);
  for (int u = 0; u < options.num_users; ++u) {
    std::vector<double> mixture = Dirichlet(topics, options.dirichlet_alpha, rng);
    LabeledUser user;
    user.user_id = absl::StrCat("user", u);
    double score = 0.0;
    for (int t = 0; t < topics; ++t) score += data.coefficients[t] * mixture[t];
    user.score = score + noise(rng);
    for (int d = 0; d < options.docs_per_user; ++d) {
      user.documents.push_back(sampler.Document(mixture, rng));
    }
    data.users.push_back(std::move(user));
    data.mixtures.push_back(std::move(mixture));
  }

  // Public documents: each centred on one public topic.
  boost::random::uniform_int_distribution<int> pick(0, options.num_public_topics - 1);
  for (int d = 0; d < options.public_docs; ++d) {
    std::vector<double> mixture(topics, 0.0);
    mixture[pick(rng)] = 0.8;
    mixture[pick(rng)] += 0.2;
    data.public_docs.push_back(sampler.Document(mixture, rng));
  }
  return data;
}

}  // namespace dpugc
