// src/losses.cpp

// Copyright 2026  The dannphone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "dannphone/losses.hpp"

#include <algorithm>
#include <cmath>

#include "dannphone/error.hpp"

namespace dannphone {

namespace {
double clamp_prob(double p, double eps) {
  return std::clamp(p, eps, 1.0 - eps);
}

void check_lengths(std::size_t p, std::size_t y) {
  if (p != y)
    fail(ErrorKind::kDimension, "prediction length ", p,
         " does not match target length ", y);
}
}  // namespace

MultiLabelTarget::MultiLabelTarget(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  for (auto b : bits_)
    if (b > 1) fail(ErrorKind::kValidation, "multi-label entries must be 0/1");
}

MultiLabelTarget MultiLabelTarget::from_reals(std::span<const double> row) {
  std::vector<std::uint8_t> bits(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] != 0.0 && row[i] != 1.0)
      fail(ErrorKind::kValidation, "multi-label entry ", i, " is ", row[i]);
    bits[i] = row[i] == 1.0;
  }
  return MultiLabelTarget(std::move(bits));
}

std::vector<std::size_t> MultiLabelTarget::positives() const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < bits_.size(); ++l)
    if (bits_[l]) out.push_back(l);
  return out;
}

std::vector<std::size_t> MultiLabelTarget::negatives() const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < bits_.size(); ++l)
    if (!bits_[l]) out.push_back(l);
  return out;
}

std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> p(z.size());
  if (z.empty()) return p;
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    sum += p[i];
  }
  for (double &v : p) v /= sum;
  return p;
}

LossValue softmax_ce(std::span<const double> probs, std::size_t y,
                     double eps) {
  if (y >= probs.size())
    fail(ErrorKind::kIndex, "class id ", y, " out of range for ", probs.size(),
         " classes");
  LossValue out;
  out.value = -std::log(clamp_prob(probs[y], eps));
  out.grad.assign(probs.begin(), probs.end());
  out.grad[y] -= 1.0;
  return out;
}

LossValue bce_multilabel(std::span<const double> p, const MultiLabelTarget &y,
                         double eps) {
  check_lengths(p.size(), y.size());
  LossValue out;
  out.grad.resize(p.size());
  for (std::size_t l = 0; l < p.size(); ++l) {
    const double q = clamp_prob(p[l], eps);
    out.value -= y[l] ? std::log(q) : std::log(1.0 - q);
    out.grad[l] = p[l] - (y[l] ? 1.0 : 0.0);
  }
  return out;
}

LossValue squared_multilabel(std::span<const double> p,
                             const MultiLabelTarget &y) {
  check_lengths(p.size(), y.size());
  LossValue out;
  out.grad.resize(p.size());
  for (std::size_t l = 0; l < p.size(); ++l) {
    const double diff = p[l] - (y[l] ? 1.0 : 0.0);
    out.value += diff * diff;
    out.grad[l] = 2.0 * diff;
  }
  return out;
}

std::optional<LossValue> pwe_loss(std::span<const double> p,
                                  const MultiLabelTarget &y) {
  check_lengths(p.size(), y.size());
  const auto pos = y.positives();
  const auto neg = y.negatives();
  if (pos.empty() || neg.empty()) return std::nullopt;
  const double norm = 1.0 / static_cast<double>(pos.size() * neg.size());
  LossValue out;
  out.grad.assign(p.size(), 0.0);
  for (std::size_t k : pos) {
    for (std::size_t l : neg) {
      const double t = std::exp(-(p[k] - p[l])) * norm;
      out.value += t;
      out.grad[k] -= t;
      out.grad[l] += t;
    }
  }
  return out;
}

LossValue domain_loss(double o, int d, double eps) {
  if (d != 0 && d != 1)
    fail(ErrorKind::kDomainLabel, "domain label must be 0 or 1, got ", d);
  const double q = clamp_prob(o, eps);
  LossValue out;
  out.value = d == 1 ? -std::log(q) : -std::log(1.0 - q);
  out.grad = {o - static_cast<double>(d)};
  return out;
}

std::string_view multilabel_loss_name(MultiLabelLoss k) {
  switch (k) {
    case MultiLabelLoss::kBce: return "bce";
    case MultiLabelLoss::kSquared: return "squared";
    case MultiLabelLoss::kPwe: return "pwe";
  }
  return "?";
}

MultiLabelLoss parse_multilabel_loss(std::string_view name) {
  if (name == "bce") return MultiLabelLoss::kBce;
  if (name == "squared") return MultiLabelLoss::kSquared;
  if (name == "pwe") return MultiLabelLoss::kPwe;
  fail(ErrorKind::kConfig, "unknown multi-label loss '", name, "'");
}

SigmoidHeadLoss sigmoid_head_loss(MultiLabelLoss kind, std::span<const double> p,
                                  const MultiLabelTarget &y, double eps) {
  SigmoidHeadLoss out;
  if (kind == MultiLabelLoss::kBce) {
    out.loss = bce_multilabel(p, y, eps);
    return out;
  }
  if (kind == MultiLabelLoss::kSquared) {
    out.loss = squared_multilabel(p, y);
  } else {
    auto pwe = pwe_loss(p, y);
    if (!pwe) {
      out.degenerate = true;
      out.loss.grad.assign(p.size(), 0.0);
      return out;
    }
    out.loss = std::move(*pwe);
  }
  // Chain through the sigmoid: dp/dlogit = p (1 - p).
  for (std::size_t l = 0; l < p.size(); ++l)
    out.loss.grad[l] *= p[l] * (1.0 - p[l]);
  return out;
}

}  // namespace dannphone
