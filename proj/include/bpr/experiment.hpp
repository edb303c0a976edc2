// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "bpr/solver.hpp"

namespace bpr {

enum class ExperimentKind {
  kNoiselessSweep,
  kBaselineCompare,
  kFourier,
  kFourierPlainDft,
  kNoisySweep,
  kCrbCompare,
  kApgdVsPgd,
  kImage,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view s);

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kNoiselessSweep;
  int n = 64;
  std::vector<double> oversampling{20.0};
  /// Input SNR values in dB; +inf means no noise.
  std::vector<double> snr_db{kNoiseless};
  /// Independent trials per cell. For crb-compare these are the noise
  /// realizations drawn for each ensemble.
  int trials = 20;
  /// Measurement ensembles per SNR (crb-compare only).
  int ensembles = 1;
  SolverConfig solver;  // solver.max_iters is the iteration budget
  std::filesystem::path image;
  std::filesystem::path out_dir = "results";
  std::uint64_t seed = 1;
  int threads = 1;

  /// Throws std::invalid_argument on bad settings.
  void validate() const;
};

/// Defaults for one experiment kind (full trial counts and grids).
ExperimentConfig default_config(ExperimentKind kind);

/// Flat INI file: `key = value` lines, '#' or ';' comments. Keys:
///   experiment, n, oversampling, snr_db, trials, ensembles, iters,
///   ls_range_max, ls_precision, momentum, anchor, image, out_dir, seed, threads.
/// Lists are comma separated; "inf" in snr_db means noiseless. Unset keys
/// take default_config(experiment). A relative image path resolves against
/// `base_dir`; out_dir is taken as given.
ExperimentConfig parse_experiment_config(std::istream& is, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Per-iteration averages over the trials of one (algo, m/n, SNR) cell.
/// SRER is averaged in dB with +inf capped at kDbCap.
struct Curve {
  std::string algo;
  double m_over_n = 0.0;
  double snr_db = kNoiseless;
  std::vector<TraceRecord> mean;
};

/// Final-iterate statistics of one cell (sample standard deviation).
struct FinalSummary {
  std::string algo;
  double m_over_n = 0.0;
  double snr_db = kNoiseless;
  int runs = 0;
  double srer_mean_db = 0.0;
  double srer_std_db = 0.0;
  double consistency_mean = 0.0;
  double cost_mean = 0.0;
};

/// crb_srer_db is the mean over ensembles of the per-ensemble bound.
/// bpr_srer_mean_db / bpr_srer_std_db are the mean and sample standard
/// deviation over ensembles of the noise-averaged final SRER.
struct CrbRow {
  double snr_db = 0.0;
  double crb_srer_db = 0.0;
  double bpr_srer_mean_db = 0.0;
  double bpr_srer_std_db = 0.0;
};

struct ImageRow {
  double m_over_n = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double srer_db = 0.0;  // mean over patches
  double consistency = 0.0;
  std::filesystem::path reconstruction;
};

struct ExperimentResult {
  std::vector<Curve> curves;
  std::vector<FinalSummary> finals;
  std::vector<CrbRow> crb;
  std::vector<ImageRow> images;
  std::vector<std::filesystem::path> files;  // everything written
};

/// Runs every cell of the experiment and writes under config.out_dir:
///   <kind>.csv        iter,cost,eta,srer_db,consistency,algo,m_over_n,snr_db
///   <kind>_final.csv  algo,m_over_n,snr_db,runs,srer_mean_db,srer_std_db,consistency_mean,cost_mean
///   <kind>_crb.csv    snr_db,crb_srer_db,bpr_srer_mean_db,bpr_srer_std_db  (crb-compare)
///   image_metrics.csv m_over_n,psnr_db,ssim,srer_db,consistency             (image)
/// plus one reconstructed PGM per oversampling factor for image runs.
/// The output directory is checked for writability before any work starts
/// (std::runtime_error otherwise). Results do not depend on config.threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace bpr
