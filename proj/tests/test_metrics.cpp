// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bpr/metrics.hpp"

using namespace bpr;

namespace {

GrayImage constant_image(int h, int w, std::uint8_t v) {
  return {w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w * h), v)};
}

GrayImage random_image(int h, int w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 255);
  GrayImage img = constant_image(h, w, 0);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(d(rng));
  return img;
}

GrayImage add_noise(const GrayImage& img, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, sd);
  GrayImage out = img;
  for (auto& p : out.pixels) p = static_cast<std::uint8_t>(std::clamp(std::round(p + g(rng)), 0.0, 255.0));
  return out;
}

// Direct windowed SSIM: every 8x8 window, population moments.
double ssim_oracle(const GrayImage& a, const GrayImage& b) {
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  double total = 0.0;
  int windows = 0;
  for (int r = 0; r + 8 <= a.height; ++r)
    for (int c = 0; c + 8 <= a.width; ++c) {
      double ma = 0, mb = 0;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          ma += a.at(r + i, c + j);
          mb += b.at(r + i, c + j);
        }
      ma /= 64;
      mb /= 64;
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          const double da = a.at(r + i, c + j) - ma, db = b.at(r + i, c + j) - mb;
          va += da * da;
          vb += db * db;
          cov += da * db;
        }
      va /= 64;
      vb /= 64;
      cov /= 64;
      total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  return total / windows;
}

}  // namespace

TEST(Srer, ExactRecoveryIsInfinite) {
  const SignalVector x = gen_unit_sphere_signal(10, 1);
  EXPECT_EQ(srer(x, x), std::numeric_limits<double>::infinity());
  EXPECT_EQ(srer(x, -x), std::numeric_limits<double>::infinity());
  EXPECT_EQ(cap_db(srer(x, x)), kDbCap);
}

TEST(Srer, ZeroEstimateIsZeroDb) {
  const SignalVector x = gen_unit_sphere_signal(10, 2);
  EXPECT_NEAR(srer(x, SignalVector::Zero(10)), 0.0, 1e-12);
}

TEST(Srer, SignInvariantAndMatchesFormula) {
  const SignalVector x = gen_unit_sphere_signal(10, 3);
  const SignalVector xh = x + 0.1 * gen_unit_sphere_signal(10, 4);
  EXPECT_EQ(srer(x, xh), srer(x, -xh));
  const double best = std::min((xh - x).squaredNorm(), (-xh - x).squaredNorm());
  EXPECT_NEAR(srer(x, xh), 10 * std::log10(x.squaredNorm() / best), 1e-12);
}

TEST(Srer, InvalidInputs) {
  EXPECT_THROW(srer(SignalVector::Zero(3), SignalVector::Ones(3)), std::invalid_argument);
  EXPECT_THROW(srer(SignalVector::Ones(3), SignalVector::Ones(4)), std::invalid_argument);
}

TEST(Consistency, Examples) {
  const SensingEnsemble e = gen_gaussian_ensemble(8, 97, 5);
  const SignalVector x = gen_unit_sphere_signal(8, 6);
  BinaryMeasurements y = encode_binary(e, x, 0.455, 0.0, 0);
  EXPECT_EQ(consistency(y, e, x), 1.0);
  BinaryMeasurements flipped = y;
  flipped.codes = -y.codes;
  EXPECT_EQ(consistency(flipped, e, x), 0.0);
  const SignalVector other = gen_unit_sphere_signal(8, 7);
  const double u = consistency(y, e, other);
  EXPECT_EQ(u, consistency(y, e, -other));
  EXPECT_GE(u, 0.0);
  EXPECT_LE(u, 1.0);
  const double count = u * 97;
  EXPECT_NEAR(count, std::round(count), 1e-9);
}

TEST(Consistency, EmptyThrows) {
  BinaryMeasurements y;
  y.codes.resize(0);
  EXPECT_THROW(consistency_from_measurements(y, Eigen::VectorXd(0)), std::invalid_argument);
}

TEST(Psnr, Examples) {
  std::mt19937_64 rng(8);
  const GrayImage a = random_image(8, 8, rng);
  EXPECT_EQ(psnr(a, a), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(psnr(constant_image(4, 4, 0), constant_image(4, 4, 255)), 0.0, 1e-12);
}

TEST(Psnr, MatchesScalarLoop) {
  std::mt19937_64 rng(9);
  const GrayImage a = random_image(8, 8, rng), b = random_image(8, 8, rng);
  double err = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) err += std::pow(double(a.pixels[i]) - double(b.pixels[i]), 2);
  EXPECT_NEAR(psnr(a, b), 20 * std::log10(255.0 * 8.0 / std::sqrt(err)), 1e-12);
}

TEST(Psnr, DecreasesWithNoise) {
  std::mt19937_64 rng(10);
  const GrayImage a = constant_image(32, 32, 128);
  double prev = std::numeric_limits<double>::infinity();
  for (double sd : {2.0, 8.0, 32.0}) {
    const double p = psnr(a, add_noise(a, sd, rng));
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Psnr, ShapeMismatchThrows) {
  EXPECT_THROW(psnr(constant_image(8, 8, 0), constant_image(8, 9, 0)), std::invalid_argument);
}

TEST(Ssim, IdenticalIsOne) {
  std::mt19937_64 rng(11);
  const GrayImage a = random_image(16, 16, rng);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
}

TEST(Ssim, ConstantImagesMatchWindowedFormula) {
  const GrayImage a = constant_image(8, 8, 0), b = constant_image(8, 8, 255);
  const double c1 = std::pow(0.01 * 255, 2);
  EXPECT_NEAR(ssim(a, b), c1 / (255.0 * 255.0 + c1), 1e-15);
  EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-15);
}

TEST(Ssim, MatchesIndependentImplementation) {
  std::mt19937_64 rng(12);
  const GrayImage a = random_image(12, 10, rng);
  const GrayImage b = add_noise(a, 20.0, rng);
  EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-10);
}

TEST(Ssim, SymmetricAndBounded) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const GrayImage a = random_image(9, 11, rng), b = random_image(9, 11, rng);
    EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
    EXPECT_GE(ssim(a, b), -1.0);
    EXPECT_LT(ssim(a, b), 1.0 - 1e-12);
  }
}

TEST(Ssim, InvalidShapes) {
  EXPECT_THROW(ssim(constant_image(8, 8, 0), constant_image(8, 9, 0)), std::invalid_argument);
  EXPECT_THROW(ssim(constant_image(7, 8, 0), constant_image(7, 8, 0)), std::invalid_argument);
}
