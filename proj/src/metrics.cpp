// SPDX-License-Identifier: Apache-2.0
#include "bpr/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpr {

double cap_db(double db) { return std::isinf(db) && db > 0 ? kDbCap : db; }

double srer(const SignalVector& x_true, const SignalVector& x_hat) {
  if (x_true.size() != x_hat.size()) throw std::invalid_argument("srer: dimension mismatch");
  const double signal = x_true.squaredNorm();
  if (signal == 0.0) throw std::invalid_argument("srer: ground truth is zero");
  const double err = std::min((x_hat - x_true).squaredNorm(), (x_hat + x_true).squaredNorm());
  if (err < 1e-15 * signal) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / err);
}

double consistency_from_measurements(const BinaryMeasurements& y, const Eigen::VectorXd& q) {
  if (q.size() != y.size()) throw std::invalid_argument("consistency: code count mismatch");
  if (y.size() == 0) throw std::invalid_argument("consistency: no measurements");
  Eigen::Index agree = 0;
  for (Eigen::Index i = 0; i < q.size(); ++i)
    if (y.codes(i) * (q(i) - y.tau) > 0.0) ++agree;
  return static_cast<double>(agree) / static_cast<double>(q.size());
}

double consistency(const BinaryMeasurements& y, const SensingEnsemble& ensemble, const SignalVector& x_hat) {
  if (ensemble.m() != y.size()) throw std::invalid_argument("consistency: code count mismatch");
  return consistency_from_measurements(y, ensemble.quadratic_measurements(x_hat));
}

namespace {

void check_same_shape(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height) throw std::invalid_argument("image shapes differ");
  if (a.pixels.size() != static_cast<std::size_t>(a.width) * a.height ||
      b.pixels.size() != static_cast<std::size_t>(b.width) * b.height)
    throw std::invalid_argument("image pixel buffer does not match its shape");
}

}  // namespace

double psnr(const GrayImage& truth, const GrayImage& estimate) {
  check_same_shape(truth, estimate);
  double err = 0.0;
  for (std::size_t i = 0; i < truth.pixels.size(); ++i) {
    const double d = static_cast<double>(truth.pixels[i]) - static_cast<double>(estimate.pixels[i]);
    err += d * d;
  }
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(truth.pixels.size());
  return 20.0 * std::log10(255.0 * std::sqrt(n) / std::sqrt(err));
}

double ssim(const GrayImage& truth, const GrayImage& estimate) {
  check_same_shape(truth, estimate);
  constexpr int kWin = 8;
  if (truth.width < kWin || truth.height < kWin) throw std::invalid_argument("ssim: image smaller than window");
  constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  constexpr double count = kWin * kWin;

  double total = 0.0;
  long windows = 0;
  for (int r = 0; r + kWin <= truth.height; ++r) {
    for (int c = 0; c + kWin <= truth.width; ++c) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < kWin; ++i) {
        for (int j = 0; j < kWin; ++j) {
          const double a = truth.at(r + i, c + j);
          const double b = estimate.at(r + i, c + j);
          sa += a;
          sb += b;
          saa += a * a;
          sbb += b * b;
          sab += a * b;
        }
      }
      const double mu_a = sa / count;
      const double mu_b = sb / count;
      const double var_a = saa / count - mu_a * mu_a;
      const double var_b = sbb / count - mu_b * mu_b;
      const double cov = sab / count - mu_a * mu_b;
      total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

}  // namespace bpr
