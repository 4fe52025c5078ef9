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

// Renyi-DP accountant for the Poisson-subsampled Gaussian mechanism.
//
// Each charge is a (sampling ratio, noise multiplier) pair. Charges with the
// same pair are counted rather than summed, so that T identical steps give
// exactly T times the single-step divergence at every order.

#ifndef DPUGC_ACCOUNTANT_H_
#define DPUGC_ACCOUNTANT_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"

namespace dpugc {

// {1.1, 1.25, ..., 4.5} U {5, ..., 64} U {80, 96, 128, 256}.
std::vector<double> DefaultRdpOrders();

// Renyi divergence of order `order` for one step of the subsampled Gaussian
// mechanism. Integer orders use the exact binomial expansion; fractional
// orders integrate numerically. q == 1 returns order / (2 sigma^2).
double SubsampledGaussianRdp(double q, double sigma, double order);

struct EpsilonSpend {
  double epsilon = 0.0;
  double order = 0.0;  // 0 when nothing has been charged
};

struct DeltaSpend {
  double delta = 0.0;
  double order = 0.0;
};

class PrivacyAccountant {
 public:
  PrivacyAccountant();
  explicit PrivacyAccountant(std::vector<double> orders);

  // Charges `steps` applications of the mechanism with ratio q and noise
  // multiplier sigma. sigma == 0 is rejected: a noiseless step has infinite
  // privacy loss.
  absl::Status Accumulate(double q, double sigma, std::int64_t steps = 1);

  // min over orders of rdp(a) + log(1/delta) / (a - 1).
  EpsilonSpend GetEpsilon(double delta) const;
  // min over orders of exp((a - 1) (rdp(a) - epsilon)), clamped to [0, 1].
  DeltaSpend GetDelta(double epsilon) const;

  const std::vector<double>& orders() const { return orders_; }
  const std::vector<double>& rdp() const { return rdp_; }
  std::int64_t steps_charged() const { return steps_; }

 private:
  struct Charge {
    double q;
    double sigma;
    std::int64_t count;
    std::vector<double> per_step;
  };

  void Recompute();

  std::vector<double> orders_;
  std::vector<Charge> charges_;
  std::vector<double> rdp_;
  std::int64_t steps_ = 0;
};

}  // namespace dpugc

#endif  // DPUGC_ACCOUNTANT_H_
