// SPDX-License-Identifier: Apache-2.0
// Command-line front end: simulate problems, reconstruct them, evaluate the
// bound, and run the configured experiments.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpr/baselines.hpp"
#include "bpr/crb.hpp"
#include "bpr/experiment.hpp"
#include "bpr/image.hpp"
#include "bpr/measurement.hpp"
#include "bpr/metrics.hpp"
#include "bpr/rng.hpp"
#include "bpr/solver.hpp"

namespace fs = std::filesystem;
using namespace bpr;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return is;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

std::string db(double v) {
  std::ostringstream os;
  if (std::isinf(v)) os << ">= " << kDbCap;
  else os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

struct SimulateArgs {
  std::string kind = "gaussian";
  std::string signal = "unit-sphere";
  int n = 64;
  double oversampling = 20.0;
  double snr_db = kNoiseless;
  std::uint64_t seed = 1;
  fs::path out_dir = ".";
};

void simulate(const SimulateArgs& a) {
  const EnsembleKind kind = ensemble_kind_from_string(a.kind);
  const SignalVector x = a.signal == "two-sinusoid" ? gen_two_sinusoid_signal(a.n)
                                                    : gen_unit_sphere_signal(a.n, derive_seed(a.seed, "simulate", {0}));
  const std::uint64_t eseed = derive_seed(a.seed, "simulate", {1});
  SensingEnsemble ens;
  double tau = 0.0;
  if (kind == EnsembleKind::kGaussian) {
    ens = gen_gaussian_ensemble(a.n, std::lround(a.oversampling * a.n), eseed);
    tau = chi1sq_quantile(0.5);
  } else {
    if (a.oversampling != std::floor(a.oversampling)) throw std::invalid_argument("Fourier kinds need integer oversampling");
    ens = gen_structured_illumination_ensemble(a.n, static_cast<Eigen::Index>(a.oversampling), eseed,
                                               kind == EnsembleKind::kFourierMask);
    tau = empirical_median_threshold(ens, x);
  }
  const double sigma = std::isfinite(a.snr_db) ? sigma_for_snr(ens, x, a.snr_db) : 0.0;
  const BinaryMeasurements y = encode_binary(ens, x, tau, sigma, derive_seed(a.seed, "simulate", {2}));
  prepare_dir(a.out_dir);
  {
    auto os = open_out(a.out_dir / "problem.csv");
    write_problem_csv(os, ens, y);
  }
  {
    auto os = open_out(a.out_dir / "truth.csv");
    write_signal_csv(os, x);
  }
  std::cout << "wrote " << (a.out_dir / "problem.csv").string() << " (m=" << ens.m() << ", tau=" << tau
            << ", sigma=" << sigma << ") and " << (a.out_dir / "truth.csv").string() << '\n';
}

struct ReconstructArgs {
  fs::path problem;
  std::optional<fs::path> truth;
  std::string algo = "bpr";
  int iters = 300;
  double ls_range_max = 0.0025;
  bool no_momentum = false;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
};

void reconstruct(const ReconstructArgs& a) {
  auto is = open_in(a.problem);
  const Problem p = read_problem_csv(is);
  std::optional<SignalVector> truth;
  if (a.truth) {
    auto ts = open_in(*a.truth);
    truth = read_signal_csv(ts);
  }
  SolverConfig cfg;
  cfg.max_iters = a.iters;
  cfg.ls_range_max = a.ls_range_max;
  cfg.momentum = !a.no_momentum;
  cfg.seed = a.seed;
  RunTrace run;
  if (a.algo == "bpr") {
    run = apgd_run(p.ensemble, p.measurements, cfg, truth);
  } else if (a.algo == "phaselift") {
    run = phaselift_run(p.ensemble, centroid_decode(p.measurements), cfg, truth);
  } else {
    throw std::invalid_argument("unknown algorithm " + a.algo);
  }
  prepare_dir(a.out_dir);
  {
    auto os = open_out(a.out_dir / "trace.csv");
    write_trace_csv(os, run);
  }
  {
    auto os = open_out(a.out_dir / "estimate.csv");
    write_signal_csv(os, run.estimate);
  }
  const TraceRecord& last = run.records.back();
  std::cout << a.algo << ": cost " << last.cost << ", consistency " << last.consistency;
  if (truth) std::cout << ", SRER " << db(last.srer_db) << " dB";
  std::cout << '\n';
}

struct CrbArgs {
  int n = 64;
  double oversampling = 20.0;
  std::vector<double> snr_db{20, 30, 40};
  int ensembles = 1;
  std::uint64_t seed = 1;
  fs::path out_dir = ".";
};

void crb(const CrbArgs& a) {
  const SignalVector x = gen_two_sinusoid_signal(a.n);
  const double tau = chi1sq_quantile(0.5);
  prepare_dir(a.out_dir);
  auto os = open_out(a.out_dir / "crb.csv");
  os << "snr_db,crb_srer_db\n";
  std::vector<SensingEnsemble> ensembles;
  for (int e = 0; e < a.ensembles; ++e)
    ensembles.push_back(gen_gaussian_ensemble(a.n, std::lround(a.oversampling * a.n),
                                              derive_seed(a.seed, "crb", {static_cast<std::uint64_t>(e)})));
  for (double snr : a.snr_db) {
    double sum = 0.0;
    for (const SensingEnsemble& ens : ensembles)
      sum += crb_srer(fisher_information(ens, x, tau, sigma_for_snr(ens, x, snr)), x);
    const double bound = sum / a.ensembles;
    os << snr << ',' << std::setprecision(10) << bound << '\n';
    std::cout << "SNR " << snr << " dB: CRB SRER " << db(bound) << " dB\n";
  }
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out_dir;
  std::optional<int> iters;
  std::vector<double> oversampling;
  std::vector<std::string> snr_db;
  std::optional<int> threads;
  bool no_momentum = false;

  void apply(ExperimentConfig& c) const {
    if (seed) c.seed = *seed;
    if (out_dir) c.out_dir = *out_dir;
    if (iters) c.solver.max_iters = *iters;
    if (!oversampling.empty()) c.oversampling = oversampling;
    if (!snr_db.empty()) {
      c.snr_db.clear();
      for (const std::string& s : snr_db) c.snr_db.push_back(s == "inf" ? kNoiseless : std::stod(s));
    }
    if (threads) c.threads = *threads;
    if (no_momentum) c.solver.momentum = false;
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--iters", o.iters, "iterations per run");
  cmd->add_option("--oversampling", o.oversampling, "oversampling factors m/n")->delimiter(',');
  cmd->add_option("--snr-db", o.snr_db, "input SNR values in dB ('inf' = noiseless)")->delimiter(',');
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_flag("--no-momentum", o.no_momentum, "plain projected gradient descent");
}

void report(const ExperimentResult& r) {
  for (const FinalSummary& f : r.finals)
    std::cout << f.algo << " m/n=" << f.m_over_n << " snr=" << f.snr_db << ": SRER " << db(f.srer_mean_db) << " +- "
              << db(f.srer_std_db) << " dB, consistency " << f.consistency_mean << '\n';
  for (const CrbRow& c : r.crb)
    std::cout << "snr=" << c.snr_db << ": CRB " << db(c.crb_srer_db) << " dB, BPR " << db(c.bpr_srer_mean_db)
              << " +- " << db(c.bpr_srer_std_db) << " dB\n";
  for (const ImageRow& i : r.images)
    std::cout << "m/n=" << i.m_over_n << ": PSNR " << db(i.psnr_db) << " dB, SSIM " << i.ssim << " -> "
              << i.reconstruction.string() << '\n';
  for (const fs::path& f : r.files) std::cout << "wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase retrieval from binary quadratic measurements"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "draw a signal, ensemble and binary codes");
  sim_cmd->add_option("--kind", sim.kind, "gaussian | fourier-mask | plain-dft");
  sim_cmd->add_option("--signal", sim.signal, "unit-sphere | two-sinusoid");
  sim_cmd->add_option("--n", sim.n, "signal dimension");
  sim_cmd->add_option("--oversampling", sim.oversampling, "m/n");
  sim_cmd->add_option("--snr-db", sim.snr_db, "input SNR in dB (default noiseless)");
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--out-dir", sim.out_dir, "output directory");

  ReconstructArgs rec;
  auto* rec_cmd = app.add_subcommand("reconstruct", "recover a signal from a problem file");
  rec_cmd->add_option("problem", rec.problem, "problem CSV written by simulate")->required();
  rec_cmd->add_option("--truth", rec.truth, "ground-truth signal CSV for SRER");
  rec_cmd->add_option("--algo", rec.algo, "bpr | phaselift");
  rec_cmd->add_option("--iters", rec.iters, "iterations");
  rec_cmd->add_option("--ls-range", rec.ls_range_max, "line-search range");
  rec_cmd->add_flag("--no-momentum", rec.no_momentum, "plain projected gradient descent");
  rec_cmd->add_option("--seed", rec.seed, "power-iteration seed");
  rec_cmd->add_option("--out-dir", rec.out_dir, "output directory");

  CrbArgs cr;
  auto* crb_cmd = app.add_subcommand("crb", "Cramer-Rao bound for the two-sinusoid signal");
  crb_cmd->add_option("--n", cr.n, "signal dimension");
  crb_cmd->add_option("--oversampling", cr.oversampling, "m/n");
  crb_cmd->add_option("--snr-db", cr.snr_db, "input SNR values in dB")->delimiter(',');
  crb_cmd->add_option("--ensembles", cr.ensembles, "ensembles to average over");
  crb_cmd->add_option("--seed", cr.seed, "master seed");
  crb_cmd->add_option("--out-dir", cr.out_dir, "output directory");

  fs::path config_path;
  Overrides exp_over;
  auto* exp_cmd = app.add_subcommand("experiment", "run an experiment from an INI config");
  exp_cmd->add_option("config", config_path, "config file")->required();
  add_overrides(exp_cmd, exp_over);

  fs::path image_path;
  Overrides img_over;
  auto* img_cmd = app.add_subcommand("image", "patchwise reconstruction of a PGM image");
  img_cmd->add_option("path", image_path, "8-bit binary PGM")->required();
  add_overrides(img_cmd, img_over);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) {
      simulate(sim);
    } else if (rec_cmd->parsed()) {
      reconstruct(rec);
    } else if (crb_cmd->parsed()) {
      crb(cr);
    } else if (exp_cmd->parsed()) {
      ExperimentConfig c = load_experiment_config(config_path);
      exp_over.apply(c);
      report(run_experiment(c));
    } else if (img_cmd->parsed()) {
      ExperimentConfig c = default_config(ExperimentKind::kImage);
      c.image = image_path;
      img_over.apply(c);
      report(run_experiment(c));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
