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

#include "dpugc/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include <boost/math/quadrature/gauss.hpp>

namespace dpugc {
namespace {

double LogAddExp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double LogBinomial(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// log A_alpha = log sum_i C(a,i) (1-q)^(a-i) q^i exp((i^2 - i) / (2 s^2)).
double LogAIntegerOrder(double q, double sigma, int order) {
  double log_a = -std::numeric_limits<double>::infinity();
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  for (int i = 0; i <= order; ++i) {
    const double term = LogBinomial(order, i) + i * log_q +
                        (order - i) * log_1mq +
                        (static_cast<double>(i) * i - i) / (2 * sigma * sigma);
    log_a = LogAddExp(log_a, term);
  }
  return log_a;
}

// A_alpha - 1 = E_{z ~ N(0, s^2)}[(1 - q + q r(z))^a - 1] with
// r(z) = exp((2z - 1) / (2 s^2)), integrated piecewise over the support.
double AMinusOneFractionalOrder(double q, double sigma, double order) {
  const double s2 = sigma * sigma;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  auto integrand = [&](double z) {
    const double t = (2.0 * z - 1.0) / (2.0 * s2);
    const double inner = std::log1p(q * std::expm1(t));
    return norm * std::exp(-z * z / (2.0 * s2)) * std::expm1(order * inner);
  };
  const double lo = -14.0 * sigma - 1.0;
  const double hi = std::ceil(order) + 14.0 * sigma + 1.0;
  const double piece = std::max(0.25, sigma / 2.0);
  double total = 0.0;
  for (double a = lo; a < hi; a += piece) {
    const double b = std::min(hi, a + piece);
    total += boost::math::quadrature::gauss<double, 30>::integrate(integrand, a, b);
  }
  return total;
}

}  // namespace

std::vector<double> DefaultRdpOrders() {
  std::vector<double> orders = {1.1,  1.25, 1.5, 1.75, 2.0, 2.25,
                                2.5,  2.75, 3.0, 3.5,  4.0, 4.5};
  for (int a = 5; a <= 64; ++a) orders.push_back(a);
  for (double a : {80.0, 96.0, 128.0, 256.0}) orders.push_back(a);
  return orders;
}

double SubsampledGaussianRdp(double q, double sigma, double order) {
  if (q >= 1.0) return order / (2.0 * sigma * sigma);
  if (q <= 0.0) return 0.0;
  if (order == std::floor(order)) {
    return LogAIntegerOrder(q, sigma, static_cast<int>(order)) / (order - 1.0);
  }
  return std::log1p(AMinusOneFractionalOrder(q, sigma, order)) / (order - 1.0);
}

PrivacyAccountant::PrivacyAccountant()
    : PrivacyAccountant(DefaultRdpOrders()) {}

PrivacyAccountant::PrivacyAccountant(std::vector<double> orders)
    : orders_(std::move(orders)), rdp_(orders_.size(), 0.0) {}

absl::Status PrivacyAccountant::Accumulate(double q, double sigma,
                                           std::int64_t steps) {
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError("infinite privacy loss");
  }
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling ratio must be in (0, 1], got ", q));
  }
  if (steps < 0) return absl::InvalidArgumentError("negative step count");
  if (steps == 0) return absl::OkStatus();

  auto it = std::find_if(charges_.begin(), charges_.end(), [&](const Charge& c) {
    return c.q == q && c.sigma == sigma;
  });
  if (it == charges_.end()) {
    Charge c{q, sigma, 0, {}};
    c.per_step.reserve(orders_.size());
    for (double a : orders_) c.per_step.push_back(SubsampledGaussianRdp(q, sigma, a));
    charges_.push_back(std::move(c));
    it = charges_.end() - 1;
  }
  it->count += steps;
  steps_ += steps;
  Recompute();
  return absl::OkStatus();
}

void PrivacyAccountant::Recompute() {
  std::fill(rdp_.begin(), rdp_.end(), 0.0);
  for (const auto& c : charges_) {
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      rdp_[i] += static_cast<double>(c.count) * c.per_step[i];
    }
  }
}

EpsilonSpend PrivacyAccountant::GetEpsilon(double delta) const {
  if (steps_ == 0) return {};
  EpsilonSpend best{std::numeric_limits<double>::infinity(), 0.0};
  const double log_inv_delta = -std::log(delta);
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const double eps = rdp_[i] + log_inv_delta / (orders_[i] - 1.0);
    if (eps < best.epsilon) best = {eps, orders_[i]};
  }
  best.epsilon = std::max(0.0, best.epsilon);
  return best;
}

DeltaSpend PrivacyAccountant::GetDelta(double epsilon) const {
  if (steps_ == 0) return {};
  DeltaSpend best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const double log_delta = (orders_[i] - 1.0) * (rdp_[i] - epsilon);
    if (log_delta < best.delta) best = {log_delta, orders_[i]};
  }
  best.delta = std::min(1.0, std::exp(best.delta));
  return best;
}

}  // namespace dpugc
