// SPDX-License-Identifier: Apache-2.0
#include "bpr/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bpr/baselines.hpp"
#include "bpr/crb.hpp"
#include "bpr/image.hpp"
#include "bpr/metrics.hpp"
#include "bpr/rng.hpp"

namespace bpr {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::kNoiselessSweep, "noiseless-sweep"},
    {ExperimentKind::kBaselineCompare, "baseline-compare"},
    {ExperimentKind::kFourier, "fourier"},
    {ExperimentKind::kFourierPlainDft, "fourier-plain-dft"},
    {ExperimentKind::kNoisySweep, "noisy-sweep"},
    {ExperimentKind::kCrbCompare, "crb-compare"},
    {ExperimentKind::kApgdVsPgd, "apgd-vs-pgd"},
    {ExperimentKind::kImage, "image"},
};

bool is_fourier(ExperimentKind kind) {
  return kind == ExperimentKind::kFourier || kind == ExperimentKind::kFourierPlainDft;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(std::string_view s) {
  for (const auto& [k, name] : kKindNames)
    if (name == s) return k;
  throw std::invalid_argument("unknown experiment '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (oversampling.empty()) throw std::invalid_argument("oversampling list is empty");
  for (double r : oversampling) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw std::invalid_argument("oversampling factors must be >= 1");
    if (is_fourier(kind) && r != std::floor(r))
      throw std::invalid_argument("Fourier ensembles need integer oversampling factors");
  }
  if (snr_db.empty()) throw std::invalid_argument("snr_db list is empty");
  for (double s : snr_db)
    if (std::isnan(s) || s == -kNoiseless) throw std::invalid_argument("snr_db entries must be finite or inf");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (ensembles < 1) throw std::invalid_argument("ensembles must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be positive");
  if (kind == ExperimentKind::kCrbCompare) {
    if (oversampling.size() != 1) throw std::invalid_argument("crb-compare takes a single oversampling factor");
    for (double s : snr_db)
      if (!std::isfinite(s)) throw std::invalid_argument("crb-compare needs finite SNR values");
  }
  if (kind == ExperimentKind::kImage && image.empty()) throw std::invalid_argument("image experiment needs an image path");
  solver.validate();
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::kNoiselessSweep:
      c.oversampling = {6, 10, 14, 20};
      break;
    case ExperimentKind::kNoisySweep:
      c.snr_db = {10, 20, 30, 40, kNoiseless};
      break;
    case ExperimentKind::kCrbCompare:
      c.snr_db = {20, 30, 40};
      c.ensembles = 20;
      break;
    case ExperimentKind::kImage:
      c.oversampling = {6, 10, 14, 20};
      c.trials = 1;
      c.solver.max_iters = 75;
      c.solver.ls_range_max = 0.0055;
      break;
    default:
      break;
  }
  return c;
}

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<double> out;
  for (std::string p : parts) {
    boost::trim(p);
    if (p.empty()) continue;
    if (boost::iequals(p, "inf")) {
      out.push_back(kNoiseless);
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size()) throw std::invalid_argument("bad number '" + p + "' for key " + key);
    out.push_back(v);
  }
  return out;
}

template <typename T>
T parse_scalar(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof()) throw std::invalid_argument("bad value '" + text + "' for key " + key);
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("bad boolean '" + text + "' for key " + key);
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& is, const std::filesystem::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  const auto kind_text = tree.get_optional<std::string>("experiment");
  if (!kind_text) throw std::invalid_argument("config: missing 'experiment' key");
  ExperimentConfig c = default_config(experiment_kind_from_string(boost::trim_copy(*kind_text)));

  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  for (const auto& [key, node] : tree) {
    if (!node.empty()) throw std::invalid_argument("config: sections are not supported ('" + key + "')");
    const std::string value = boost::trim_copy(node.data());
    if (key == "experiment") continue;
    if (key == "n") c.n = parse_scalar<int>(value, key);
    else if (key == "oversampling") c.oversampling = parse_list(value, key);
    else if (key == "snr_db") c.snr_db = parse_list(value, key);
    else if (key == "trials") c.trials = parse_scalar<int>(value, key);
    else if (key == "ensembles") c.ensembles = parse_scalar<int>(value, key);
    else if (key == "iters") c.solver.max_iters = parse_scalar<int>(value, key);
    else if (key == "ls_range_max") c.solver.ls_range_max = parse_scalar<double>(value, key);
    else if (key == "ls_precision") c.solver.ls_precision = parse_scalar<double>(value, key);
    else if (key == "momentum") c.solver.momentum = parse_bool(value, key);
    else if (key == "anchor") {
      if (value == "momentum-point") c.solver.anchor = LineSearchAnchor::kMomentumPoint;
      else if (value == "iterate") c.solver.anchor = LineSearchAnchor::kIterate;
      else throw std::invalid_argument("config: anchor must be momentum-point or iterate");
    } else if (key == "image") c.image = resolve(value);
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "seed") c.seed = parse_scalar<std::uint64_t>(value, key);
    else if (key == "threads") c.threads = parse_scalar<int>(value, key);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  return parse_experiment_config(is, path.parent_path());
}

namespace {

// Evaluates fn(0..count-1) on up to `threads` workers; results keep index order.
template <typename T, typename Fn>
std::vector<T> ordered_map(std::size_t count, int threads, Fn fn) {
  std::vector<T> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

Curve average_curve(const std::string& algo, double ratio, double snr, const std::vector<const RunTrace*>& runs) {
  Curve c{algo, ratio, snr, {}};
  const std::size_t len = runs.front()->records.size();
  c.mean.resize(len);
  const double k = static_cast<double>(runs.size());
  for (std::size_t t = 0; t < len; ++t) {
    TraceRecord& m = c.mean[t];
    m.iter = runs.front()->records[t].iter;
    for (const RunTrace* r : runs) {
      const TraceRecord& rec = r->records[t];
      m.cost += rec.cost / k;
      m.eta += rec.eta / k;
      m.srer_db += cap_db(rec.srer_db) / k;
      m.consistency += rec.consistency / k;
    }
  }
  return c;
}

FinalSummary summarize(const std::string& algo, double ratio, double snr, const std::vector<const RunTrace*>& runs) {
  std::vector<double> srers, cons, costs;
  for (const RunTrace* r : runs) {
    srers.push_back(cap_db(r->records.back().srer_db));
    cons.push_back(r->records.back().consistency);
    costs.push_back(r->records.back().cost);
  }
  return {algo, ratio, snr, static_cast<int>(runs.size()), mean_of(srers), sample_std(srers), mean_of(cons),
          mean_of(costs)};
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const std::filesystem::path probe = dir / ".bpr-write-probe";
  {
    std::ofstream os(probe);
    if (!os || !(os << "ok") || !os.flush()) throw std::runtime_error("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

// Seed streams. Every random object of a cell has its own tag so that, e.g.,
// the SNR sweep reuses one signal and ensemble per trial.
enum SeedTag : std::uint64_t { kSignalSeed = 0, kEnsembleSeed = 1, kNoiseSeed = 2, kImageSeed = 3 };

struct Instance {
  SignalVector x;
  SensingEnsemble ensemble;
  double tau = 0.0;
};

Instance make_instance(const ExperimentConfig& c, std::size_t ratio_idx, std::size_t trial) {
  const std::string_view name = to_string(c.kind);
  const double ratio = c.oversampling[ratio_idx];
  Instance inst;
  inst.x = c.kind == ExperimentKind::kCrbCompare ? gen_two_sinusoid_signal(c.n)
                                                 : gen_unit_sphere_signal(c.n, derive_seed(c.seed, name, {kSignalSeed, ratio_idx, trial}));
  const std::uint64_t eseed = derive_seed(c.seed, name, {kEnsembleSeed, ratio_idx, trial});
  if (is_fourier(c.kind)) {
    inst.ensemble = gen_structured_illumination_ensemble(c.n, static_cast<Eigen::Index>(ratio), eseed,
                                                         c.kind == ExperimentKind::kFourier);
    inst.tau = empirical_median_threshold(inst.ensemble, inst.x);
  } else {
    inst.ensemble = gen_gaussian_ensemble(c.n, std::lround(ratio * c.n), eseed);
    inst.tau = chi1sq_quantile(0.5);
  }
  return inst;
}

std::vector<std::string> algorithms(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kBaselineCompare:
    case ExperimentKind::kFourier:
    case ExperimentKind::kFourierPlainDft:
      return {"bpr", "phaselift"};
    case ExperimentKind::kApgdVsPgd:
      return {"apgd", "pgd"};
    default:
      return {"bpr"};
  }
}

RunTrace run_algorithm(const std::string& algo, const Instance& inst, const BinaryMeasurements& y,
                       SolverConfig solver) {
  if (algo == "phaselift") {
    const IntervalCentroids centroids = inst.ensemble.is_complex()
                                            ? empirical_centroids(inst.ensemble, inst.x, inst.tau)
                                            : interval_centroids(inst.tau);
    return phaselift_run(inst.ensemble, centroid_decode(y, centroids), solver, inst.x);
  }
  if (algo == "apgd") solver.momentum = true;
  if (algo == "pgd") solver.momentum = false;
  return apgd_run(inst.ensemble, y, solver, inst.x);
}

double noise_sigma(const Instance& inst, double snr) {
  return std::isfinite(snr) ? sigma_for_snr(inst.ensemble, inst.x, snr) : 0.0;
}

void write_curves(const std::filesystem::path& path, const std::vector<Curve>& curves) {
  std::ofstream os = open_output(path);
  os << "iter,cost,eta,srer_db,consistency,algo,m_over_n,snr_db\n";
  for (const Curve& c : curves)
    for (const TraceRecord& r : c.mean)
      os << r.iter << ',' << format_number(r.cost) << ',' << format_number(r.eta) << ','
         << format_number(r.srer_db) << ',' << format_number(r.consistency) << ',' << c.algo << ','
         << format_number(c.m_over_n) << ',' << format_number(c.snr_db) << '\n';
}

void write_finals(const std::filesystem::path& path, const std::vector<FinalSummary>& finals) {
  std::ofstream os = open_output(path);
  os << "algo,m_over_n,snr_db,runs,srer_mean_db,srer_std_db,consistency_mean,cost_mean\n";
  for (const FinalSummary& f : finals)
    os << f.algo << ',' << format_number(f.m_over_n) << ',' << format_number(f.snr_db) << ',' << f.runs << ','
       << format_number(f.srer_mean_db) << ',' << format_number(f.srer_std_db) << ','
       << format_number(f.consistency_mean) << ',' << format_number(f.cost_mean) << '\n';
}

// Gaussian and Fourier sweeps: one job per (oversampling, trial); each job
// encodes every SNR and runs every algorithm on the shared instance.
void run_sweep(const ExperimentConfig& c, ExperimentResult& result) {
  const std::vector<std::string> algos = algorithms(c.kind);
  const std::size_t n_ratio = c.oversampling.size();
  const std::size_t n_snr = c.snr_db.size();
  const std::size_t n_trial = static_cast<std::size_t>(c.trials);
  const std::string_view name = to_string(c.kind);

  // runs[job][snr * algos + algo]
  const auto runs = ordered_map<std::vector<RunTrace>>(n_ratio * n_trial, c.threads, [&](std::size_t job) {
    const std::size_t ri = job / n_trial;
    const std::size_t trial = job % n_trial;
    const Instance inst = make_instance(c, ri, trial);
    std::vector<RunTrace> out;
    for (std::size_t si = 0; si < n_snr; ++si) {
      const double sigma = noise_sigma(inst, c.snr_db[si]);
      const BinaryMeasurements y =
          encode_binary(inst.ensemble, inst.x, inst.tau, sigma, derive_seed(c.seed, name, {kNoiseSeed, ri, si, trial}));
      for (const std::string& algo : algos) out.push_back(run_algorithm(algo, inst, y, c.solver));
    }
    return out;
  });

  for (std::size_t ri = 0; ri < n_ratio; ++ri)
    for (std::size_t si = 0; si < n_snr; ++si)
      for (std::size_t ai = 0; ai < algos.size(); ++ai) {
        std::vector<const RunTrace*> cell;
        for (std::size_t t = 0; t < n_trial; ++t) cell.push_back(&runs[ri * n_trial + t][si * algos.size() + ai]);
        result.curves.push_back(average_curve(algos[ai], c.oversampling[ri], c.snr_db[si], cell));
        result.finals.push_back(summarize(algos[ai], c.oversampling[ri], c.snr_db[si], cell));
      }
}

// Two-level averaging: `trials` noise realizations per ensemble, `ensembles`
// ensembles per SNR. One job per ensemble so its Gram cache is reused.
void run_crb(const ExperimentConfig& c, ExperimentResult& result) {
  const std::size_t n_snr = c.snr_db.size();
  const std::size_t n_trial = static_cast<std::size_t>(c.trials);
  const std::size_t n_ens = static_cast<std::size_t>(c.ensembles);
  const std::string_view name = to_string(c.kind);

  struct EnsembleOutput {
    std::vector<double> crb;       // per SNR
    std::vector<RunTrace> runs;    // [snr * trials + trial]
  };
  const auto outputs = ordered_map<EnsembleOutput>(n_ens, c.threads, [&](std::size_t e) {
    const Instance inst = make_instance(c, 0, e);
    EnsembleOutput out;
    for (std::size_t si = 0; si < n_snr; ++si) {
      const double sigma = noise_sigma(inst, c.snr_db[si]);
      out.crb.push_back(crb_srer(fisher_information(inst.ensemble, inst.x, inst.tau, sigma), inst.x));
      for (std::size_t t = 0; t < n_trial; ++t) {
        const BinaryMeasurements y =
            encode_binary(inst.ensemble, inst.x, inst.tau, sigma, derive_seed(c.seed, name, {kNoiseSeed, e, si, t}));
        out.runs.push_back(apgd_run(inst.ensemble, y, c.solver, inst.x));
      }
    }
    return out;
  });

  for (std::size_t si = 0; si < n_snr; ++si) {
    std::vector<const RunTrace*> all;
    std::vector<double> crbs, per_ensemble;
    for (const EnsembleOutput& out : outputs) {
      crbs.push_back(out.crb[si]);
      std::vector<double> finals;
      for (std::size_t t = 0; t < n_trial; ++t) {
        const RunTrace& r = out.runs[si * n_trial + t];
        all.push_back(&r);
        finals.push_back(cap_db(r.records.back().srer_db));
      }
      per_ensemble.push_back(mean_of(finals));
    }
    result.curves.push_back(average_curve("bpr", c.oversampling[0], c.snr_db[si], all));
    result.finals.push_back(summarize("bpr", c.oversampling[0], c.snr_db[si], all));
    result.crb.push_back({c.snr_db[si], mean_of(crbs), mean_of(per_ensemble), sample_std(per_ensemble)});
  }
}

std::string ratio_label(double r) {
  std::ostringstream os;
  os << r;
  std::string s = os.str();
  for (char& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

void run_image(const ExperimentConfig& c, ExperimentResult& result) {
  const GrayImage truth = read_pgm(c.image);
  make_patch_grid(truth.height, truth.width, 0);  // fail fast on bad dimensions
  const auto recon = ordered_map<ImageReconstruction>(c.oversampling.size(), c.threads, [&](std::size_t ri) {
    ImageReconstructionConfig ic;
    ic.oversampling = c.oversampling[ri];
    ic.solver = c.solver;
    ic.seed = derive_seed(c.seed, to_string(c.kind), {kImageSeed, ri});
    return image_reconstruct(truth, ic);
  });
  for (std::size_t ri = 0; ri < recon.size(); ++ri) {
    const auto path = c.out_dir / ("image_recon_mn" + ratio_label(c.oversampling[ri]) + ".pgm");
    write_pgm(path, recon[ri].image);
    result.files.push_back(path);
    result.images.push_back({c.oversampling[ri], *recon[ri].report.psnr_db, *recon[ri].report.ssim,
                             recon[ri].report.srer_db, recon[ri].report.consistency, path});
  }
  const auto path = c.out_dir / "image_metrics.csv";
  std::ofstream os = open_output(path);
  os << "m_over_n,psnr_db,ssim,srer_db,consistency\n";
  for (const ImageRow& r : result.images)
    os << format_number(r.m_over_n) << ',' << format_number(cap_db(r.psnr_db)) << ',' << format_number(r.ssim) << ','
       << format_number(r.srer_db) << ',' << format_number(r.consistency) << '\n';
  result.files.push_back(path);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ensure_writable(config.out_dir);
  ExperimentResult result;

  if (config.kind == ExperimentKind::kImage) {
    run_image(config, result);
    return result;
  }
  if (config.kind == ExperimentKind::kCrbCompare) {
    run_crb(config, result);
    const auto path = config.out_dir / "crb-compare_crb.csv";
    std::ofstream os = open_output(path);
    os << "snr_db,crb_srer_db,bpr_srer_mean_db,bpr_srer_std_db\n";
    for (const CrbRow& r : result.crb)
      os << format_number(r.snr_db) << ',' << format_number(r.crb_srer_db) << ','
         << format_number(r.bpr_srer_mean_db) << ',' << format_number(r.bpr_srer_std_db) << '\n';
    result.files.push_back(path);
  } else {
    run_sweep(config, result);
  }

  const std::string stem(to_string(config.kind));
  write_curves(config.out_dir / (stem + ".csv"), result.curves);
  write_finals(config.out_dir / (stem + "_final.csv"), result.finals);
  result.files.push_back(config.out_dir / (stem + ".csv"));
  result.files.push_back(config.out_dir / (stem + "_final.csv"));
  return result;
}

}  // namespace bpr
