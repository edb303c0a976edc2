// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bpr/measurement.hpp"

namespace bpr {

/// Value written to CSV files in place of an infinite SRER or PSNR.
inline constexpr double kDbCap = 300.0;

/// Maps +inf to kDbCap; other values pass through.
double cap_db(double db);

/// Sign-invariant signal-to-reconstruction error ratio in dB. Returns +inf
/// when the best-sign error energy is below 1e-15 ||x_true||^2.
double srer(const SignalVector& x_true, const SignalVector& x_hat);

/// Fraction of codes with y_i (|a_i^H x_hat|^2 - tau) > 0.
double consistency(const BinaryMeasurements& y, const SensingEnsemble& ensemble, const SignalVector& x_hat);
/// Same from precomputed quadratic measurements.
double consistency_from_measurements(const BinaryMeasurements& y, const Eigen::VectorXd& q);

/// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// 20 log10(255 sqrt(N) / ||I - I_hat||_F); +inf for identical images.
double psnr(const GrayImage& truth, const GrayImage& estimate);

/// Mean SSIM over all 8x8 windows (stride 1, uniform weights, population
/// moments) with K1 = 0.01, K2 = 0.03, L = 255.
double ssim(const GrayImage& truth, const GrayImage& estimate);

struct MetricReport {
  double srer_db = 0.0;
  double consistency = 0.0;
  std::optional<double> psnr_db;
  std::optional<double> ssim;
};

}  // namespace bpr
