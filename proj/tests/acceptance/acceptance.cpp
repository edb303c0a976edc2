// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [--fast]   (--fast uses the 64x64 image tier)
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bpr/experiment.hpp"

using namespace bpr;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

std::string fmt(double v, int prec = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

const FinalSummary& find(const ExperimentResult& r, const std::string& algo, double ratio, double snr) {
  for (const auto& f : r.finals)
    if (f.algo == algo && f.m_over_n == ratio && (f.snr_db == snr || (std::isinf(snr) && std::isinf(f.snr_db))))
      return f;
  throw std::runtime_error("missing cell " + algo);
}

ExperimentResult run(ExperimentConfig c, const fs::path& root) {
  c.out_dir = root / std::string(to_string(c.kind));
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult r = run_experiment(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "  [" << to_string(c.kind) << " finished in " << fmt(secs, 1) << " s]" << std::endl;
  return r;
}

// Runs a unit-test binary restricted to a gtest filter.
bool gtest_passes(const char* binary, const std::string& filter) {
  const std::string cmd = std::string("\"") + binary + "\" --gtest_brief=1 --gtest_filter='" + filter + "' > /dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

void guarded(const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  const bool fast = argc > 1 && std::string(argv[1]) == "--fast";
  const fs::path root = fs::temp_directory_path() / "bpr_acceptance";
  fs::remove_all(root);

  guarded("noiseless-srer / oversampling-monotonicity", [&] {
    const ExperimentResult r = run(default_config(ExperimentKind::kNoiselessSweep), root);
    const FinalSummary& top = find(r, "bpr", 20, kNoiseless);
    report(top.srer_mean_db >= 22.0 && top.srer_mean_db <= 28.0, "noiseless-srer",
           "mean final SRER " + fmt(top.srer_mean_db) + " dB over " + std::to_string(top.runs) +
               " trials (n=64, m/n=20, 300 iters), band [22, 28]");
    bool increasing = true;
    std::string trail;
    double prev = -1e300;
    for (double ratio : {6.0, 10.0, 14.0, 20.0}) {
      const double v = find(r, "bpr", ratio, kNoiseless).srer_mean_db;
      increasing = increasing && v > prev;
      prev = v;
      trail += (trail.empty() ? "" : " < ") + fmt(v);
    }
    report(increasing && top.consistency_mean >= 0.97, "oversampling-monotonicity",
           "SRER over m/n {6,10,14,20}: " + trail + " dB; consistency at m/n=20 " + fmt(top.consistency_mean, 4) +
               " (>= 0.97)");
  });

  guarded("baseline-gap", [&] {
    const ExperimentResult r = run(default_config(ExperimentKind::kBaselineCompare), root);
    const FinalSummary& b = find(r, "bpr", 20, kNoiseless);
    const FinalSummary& p = find(r, "phaselift", 20, kNoiseless);
    const double gap = b.srer_mean_db - p.srer_mean_db;
    report(gap >= 2.0 && b.consistency_mean > p.consistency_mean, "baseline-gap",
           "BPR " + fmt(b.srer_mean_db) + " dB vs PhaseLift " + fmt(p.srer_mean_db) + " dB (gap " + fmt(gap) +
               " >= 2); consistency " + fmt(b.consistency_mean, 4) + " vs " + fmt(p.consistency_mean, 4));
  });

  guarded("fourier", [&] {
    const ExperimentResult masked = run(default_config(ExperimentKind::kFourier), root);
    const ExperimentResult plain = run(default_config(ExperimentKind::kFourierPlainDft), root);
    const double ratio = default_config(ExperimentKind::kFourier).oversampling.front();
    const double bm = find(masked, "bpr", ratio, kNoiseless).srer_mean_db;
    const double pm = find(masked, "phaselift", ratio, kNoiseless).srer_mean_db;
    const double bp = find(plain, "bpr", ratio, kNoiseless).srer_mean_db;
    const double pp = find(plain, "phaselift", ratio, kNoiseless).srer_mean_db;
    report(bm - pm >= 2.0 && bp < 5.0 && pp < 5.0, "fourier",
           "masked: BPR " + fmt(bm) + " vs PhaseLift " + fmt(pm) + " dB (gap " + fmt(bm - pm) +
               " >= 2); plain DFT: BPR " + fmt(bp) + ", PhaseLift " + fmt(pp) + " dB (both < 5)");
  });

  guarded("crb-tracking", [&] {
    const ExperimentResult r = run(default_config(ExperimentKind::kCrbCompare), root);
    bool ok = true;
    std::string detail;
    for (const CrbRow& row : r.crb) {
      const bool in_band = row.bpr_srer_mean_db >= row.crb_srer_db - 5.0 && row.bpr_srer_mean_db <= row.crb_srer_db;
      const bool tight = row.bpr_srer_std_db <= 2.0;
      ok = ok && in_band && tight;
      detail += (detail.empty() ? "" : "; ") + fmt(row.snr_db, 0) + " dB: BPR " + fmt(row.bpr_srer_mean_db) +
                " (std " + fmt(row.bpr_srer_std_db) + ") vs CRB " + fmt(row.crb_srer_db) +
                (in_band ? "" : " [outside band]") + (tight ? "" : " [std > 2]");
    }
    report(ok, "crb-tracking", detail);
  });

  guarded("noise-robustness", [&] {
    ExperimentConfig c = default_config(ExperimentKind::kNoisySweep);
    c.snr_db = {30.0, kNoiseless};
    const ExperimentResult r = run(c, root);
    const double noisy = find(r, "bpr", 20, 30.0).srer_mean_db;
    const double clean = find(r, "bpr", 20, kNoiseless).srer_mean_db;
    report(std::abs(noisy - clean) <= 2.0, "noise-robustness",
           "30 dB input: " + fmt(noisy) + " dB vs noiseless " + fmt(clean) + " dB (|diff| " +
               fmt(std::abs(noisy - clean)) + " <= 2)");
  });

  guarded("image", [&] {
    ExperimentConfig c = default_config(ExperimentKind::kImage);
    c.image = fs::path(BPR_DATA_DIR) / (fast ? "camera_64.pgm" : "camera_256.pgm");
    const ExperimentResult r = run(c, root);
    bool monotone = true;
    std::string trail;
    for (std::size_t i = 0; i < r.images.size(); ++i) {
      if (i > 0) monotone = monotone && r.images[i].psnr_db >= r.images[i - 1].psnr_db &&
                            r.images[i].ssim >= r.images[i - 1].ssim;
      trail += (trail.empty() ? "" : ", ") + fmt(r.images[i].psnr_db) + "/" + fmt(r.images[i].ssim, 3);
    }
    const ImageRow& top = r.images.back();
    const bool psnr_ok = top.psnr_db >= 26.0 && top.psnr_db <= 32.0;
    const bool ssim_ok = top.ssim >= 0.55 && top.ssim <= 0.80;
    report(psnr_ok && ssim_ok && monotone, std::string("image") + (fast ? " (64x64 tier)" : ""),
           "m/n=20: PSNR " + fmt(top.psnr_db) + " dB in [26, 32], SSIM " + fmt(top.ssim, 3) +
               " in [0.55, 0.80]; PSNR/SSIM over m/n {6,10,14,20}: " + trail);
  });

  struct Property {
    const char* name;
    const char* binary;
    const char* filter;
  };
  const Property props[] = {
      {"property: PGD monotone descent (step 1/C0, 50 x 100)", BPR_TEST_SOLVER, "Pgd.MonotoneDescentWithSafeStep"},
      {"property: BPR gradient vs finite differences", BPR_TEST_SOLVER, "BprGradient.MatchesFiniteDifferences*"},
      {"property: PhaseLift gradient vs finite differences", BPR_TEST_BASELINES,
       "PhaseliftGradient.MatchesFiniteDifferences"},
      {"property: rank-1 projection vs dense oracle", BPR_TEST_LINALG, "Rank1Projection.MatchesDenseOracleUpToDimTen"},
      {"property: Fisher matrix vs Monte-Carlo score covariance", BPR_TEST_CRB, "Fisher.MatchesMonteCarlo*"},
      {"property: APGD cost <= PGD cost at iteration 75", BPR_TEST_SOLVER, "Apgd.BeatsPgdAtSeventyFiveIterations"},
      {"property: chi1sq median 0.4550 +- 5e-5", BPR_TEST_MEASUREMENT, "Chi1sq.MedianGoldenNumber"},
      {"property: interval centroids (0.1427, 1.8573) +- 1e-3", BPR_TEST_MEASUREMENT, "IntervalCentroids.GoldenNumbers"},
  };
  for (const Property& p : props) report(gtest_passes(p.binary, p.filter), p.name, std::string("gtest ") + p.filter);

  fs::remove_all(root);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criterion checks FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
