// SPDX-License-Identifier: Apache-2.0
#include "bpr/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bpr {

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::kGaussian: return "gaussian";
    case EnsembleKind::kFourierMask: return "fourier-mask";
    case EnsembleKind::kPlainDft: return "plain-dft";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from_string(std::string_view s) {
  if (s == "gaussian") return EnsembleKind::kGaussian;
  if (s == "fourier-mask") return EnsembleKind::kFourierMask;
  if (s == "plain-dft") return EnsembleKind::kPlainDft;
  throw std::invalid_argument("unknown ensemble kind: " + std::string(s));
}

SensingEnsemble::SensingEnsemble(EnsembleKind kind, Eigen::MatrixXd real_rows, Eigen::MatrixXd imag_rows)
    : kind_(kind), re_(std::move(real_rows)), im_(std::move(imag_rows)) {
  if (kind_ == EnsembleKind::kGaussian) {
    if (im_.size() != 0) throw std::invalid_argument("SensingEnsemble: Gaussian rows are real");
  } else if (im_.rows() != re_.rows() || im_.cols() != re_.cols()) {
    throw std::invalid_argument("SensingEnsemble: real/imaginary parts differ in shape");
  }
}

Eigen::VectorXd SensingEnsemble::quadratic_measurements(const SignalVector& x) const {
  if (x.size() != n()) throw std::invalid_argument("quadratic_measurements: dimension mismatch");
  Eigen::VectorXd q = (re_ * x).array().square();
  if (is_complex()) q.array() += (im_ * x).array().square();
  return q;
}

Eigen::VectorXd SensingEnsemble::lifted_image(const SymmetricMatrix& x) const {
  if (x.dim() != n()) throw std::invalid_argument("lifted_image: dimension mismatch");
  Eigen::VectorXd t = (re_ * x.matrix()).cwiseProduct(re_).rowwise().sum();
  if (is_complex()) t += (im_ * x.matrix()).cwiseProduct(im_).rowwise().sum();
  return t;
}

namespace {

// sum_i w_i r_i r_i^T over rows with nonzero weight, lower triangle only.
void accumulate_weighted_gram(const Eigen::MatrixXd& rows, const Eigen::VectorXd& w,
                              const std::vector<Eigen::Index>& active, Eigen::MatrixXd& out) {
  const Eigen::Index k = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd b(k, rows.cols());
  Eigen::MatrixXd bw(k, rows.cols());
  for (Eigen::Index r = 0; r < k; ++r) {
    b.row(r) = rows.row(active[r]);
    bw.row(r) = w(active[r]) * rows.row(active[r]);
  }
  out.noalias() += bw.transpose() * b;
}

}  // namespace

SymmetricMatrix SensingEnsemble::lifted_adjoint(const Eigen::VectorXd& w) const {
  if (w.size() != m()) throw std::invalid_argument("lifted_adjoint: weight count mismatch");
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) != 0.0) active.push_back(i);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n(), n());
  if (active.empty()) return SymmetricMatrix::zero(n());
  accumulate_weighted_gram(re_, w, active, g);
  if (is_complex()) accumulate_weighted_gram(im_, w, active, g);
  return SymmetricMatrix::from_lower(std::move(g));
}

SymmetricMatrix SensingEnsemble::lifted_form(Eigen::Index i) const {
  if (i < 0 || i >= m()) throw std::out_of_range("lifted_form: row index out of range");
  Eigen::VectorXd re = re_.row(i).transpose();
  SymmetricMatrix a = SymmetricMatrix::outer(re);
  if (is_complex()) {
    Eigen::VectorXd im = im_.row(i).transpose();
    a += SymmetricMatrix::outer(im);
  }
  return a;
}

Eigen::VectorXd SensingEnsemble::lifted_traces() const {
  Eigen::VectorXd t = re_.rowwise().squaredNorm();
  if (is_complex()) t += im_.rowwise().squaredNorm();
  return t;
}

SensingEnsemble SensingEnsemble::head(Eigen::Index rows) const {
  if (rows < 0 || rows > m()) throw std::out_of_range("head: row count out of range");
  if (!is_complex()) return SensingEnsemble(kind_, re_.topRows(rows));
  return SensingEnsemble(kind_, re_.topRows(rows), im_.topRows(rows));
}

const Eigen::MatrixXd& SensingEnsemble::lifted_gram() const {
  std::call_once(gram_->once, [this] {
    Eigen::MatrixXd inner = re_ * re_.transpose();
    Eigen::MatrixXd k = inner.array().square().matrix();
    if (is_complex()) {
      inner.noalias() = im_ * im_.transpose();
      k.array() += inner.array().square();
      inner.noalias() = re_ * im_.transpose();
      // (re_i . im_j)^2 + (im_i . re_j)^2
      k.array() += inner.array().square() + inner.transpose().array().square();
    }
    gram_->gram = std::move(k);
  });
  return gram_->gram;
}

Eigen::VectorXd SensingEnsemble::lifted_image_of_adjoint(const Eigen::VectorXd& w) const {
  if (w.size() != m()) throw std::invalid_argument("lifted_image_of_adjoint: weight count mismatch");
  if (m() > kMaxGramRows) return lifted_image(lifted_adjoint(w));
  const Eigen::MatrixXd& k = lifted_gram();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m());
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w(j) != 0.0) out += w(j) * k.col(j);
  return out;
}

SignalVector gen_unit_sphere_signal(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_unit_sphere_signal: n must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  SignalVector x(n);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(gen);
    norm = x.norm();
  } while (norm == 0.0);
  return x / norm;
}

SignalVector gen_two_sinusoid_signal(Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("gen_two_sinusoid_signal: n must be at least 2");
  using std::numbers::pi;
  SignalVector x(n);
  const double nd = static_cast<double>(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const double ld = static_cast<double>(l);
    x(l) = 1.5 * std::sin(4.0 * pi * ld / nd) + 2.5 * std::cos(14.0 * pi * ld / nd);
  }
  return x / x.norm();
}

SensingEnsemble gen_gaussian_ensemble(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("gen_gaussian_ensemble: n and m must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(gen);
  return SensingEnsemble(EnsembleKind::kGaussian, std::move(a));
}

SensingEnsemble gen_structured_illumination_ensemble(Eigen::Index n, Eigen::Index k,
                                                     std::uint64_t seed, bool randomize) {
  if (n < 2 || k < 1) throw std::invalid_argument("gen_structured_illumination_ensemble: need n >= 2, k >= 1");
  using std::numbers::pi;
  Eigen::MatrixXd cos_table(n, n);
  Eigen::MatrixXd sin_table(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      const double angle = 2.0 * pi * static_cast<double>((p * q) % n) / static_cast<double>(n);
      cos_table(p, q) = std::cos(angle);
      sin_table(p, q) = -std::sin(angle);
    }
  }

  std::mt19937_64 gen(seed);
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXd re(k * n, n);
  Eigen::MatrixXd im(k * n, n);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(n);
    if (randomize)
      for (Eigen::Index q = 0; q < n; ++q) mask(q) = coin(gen) ? 1.0 : 0.0;
    re.middleRows(j * n, n) = cos_table * mask.asDiagonal();
    im.middleRows(j * n, n) = sin_table * mask.asDiagonal();
  }
  return SensingEnsemble(randomize ? EnsembleKind::kFourierMask : EnsembleKind::kPlainDft,
                         std::move(re), std::move(im));
}

double chi1sq_cdf(double t) {
  if (t <= 0.0) return 0.0;
  return std::erf(std::sqrt(0.5 * t));
}

double chi1sq_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi1sq_quantile: p must lie in (0, 1)");
  double lo = 0.0;
  double hi = 50.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (chi1sq_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

IntervalCentroids interval_centroids(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("interval_centroids: tau must be positive");
  using boost::math::quadrature::gauss_kronrod;
  // q f(q) for the chi^2_1 density; finite at q = 0.
  const auto first_moment = [](double q) {
    return std::sqrt(q) * std::exp(-0.5 * q) / std::sqrt(2.0 * std::numbers::pi);
  };
  const double below = gauss_kronrod<double, 31>::integrate(first_moment, 0.0, tau, 20, 1e-13);
  const double above = gauss_kronrod<double, 31>::integrate(
      first_moment, tau, std::numeric_limits<double>::infinity(), 20, 1e-13);
  const double p_below = chi1sq_cdf(tau);
  const double p_above = std::erfc(std::sqrt(0.5 * tau));
  IntervalCentroids c;
  c.low = below / p_below;
  c.high = p_above > 0.0 ? above / p_above : tau;
  return c;
}

double sigma_for_snr(const SensingEnsemble& ensemble, const SignalVector& x, double snr_db) {
  if (x.size() != ensemble.n()) throw std::invalid_argument("sigma_for_snr: dimension mismatch");
  if (x.isZero(0.0)) throw std::invalid_argument("sigma_for_snr: SNR undefined for the zero signal");
  const Eigen::VectorXd q = ensemble.quadratic_measurements(x);
  const double power = q.squaredNorm();
  if (power == 0.0) throw std::invalid_argument("sigma_for_snr: all measurements vanish");
  const double m = static_cast<double>(ensemble.m());
  return std::sqrt(power / (m * std::pow(10.0, snr_db / 10.0)));
}

BinaryMeasurements encode_binary(const SensingEnsemble& ensemble, const SignalVector& x, double tau,
                                 double noise_sigma, std::uint64_t seed) {
  if (!(tau > 0.0)) throw std::invalid_argument("encode_binary: tau must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("encode_binary: noise sigma must be nonnegative");
  const Eigen::VectorXd q = ensemble.quadratic_measurements(x);
  BinaryMeasurements y;
  y.tau = tau;
  y.noise_sigma = noise_sigma;
  y.seed = seed;
  y.codes.resize(q.size());
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double xi = noise_sigma > 0.0 ? normal(gen) : 0.0;
    y.codes(i) = (q(i) + xi - tau > 0.0) ? 1.0 : -1.0;
  }
  return y;
}

double empirical_median_threshold(const SensingEnsemble& ensemble, const SignalVector& x) {
  if (ensemble.m() < 2) throw std::invalid_argument("empirical_median_threshold: need at least two measurements");
  const Eigen::VectorXd q = ensemble.quadratic_measurements(x);
  std::vector<double> v(q.data(), q.data() + q.size());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size() && s.find_first_not_of(" \r", pos) != std::string::npos)
    throw std::runtime_error("malformed number: " + s);
  return v;
}

}  // namespace

void write_problem_csv(std::ostream& os, const SensingEnsemble& ensemble, const BinaryMeasurements& y) {
  if (y.size() != ensemble.m()) throw std::invalid_argument("write_problem_csv: code count mismatch");
  const auto old_precision = os.precision(17);
  os << "# kind=" << to_string(ensemble.kind()) << " n=" << ensemble.n() << " m=" << ensemble.m()
     << " tau=" << y.tau << " sigma=" << y.noise_sigma << " seed=" << y.seed << '\n';
  os << "code";
  for (Eigen::Index j = 0; j < ensemble.n(); ++j) os << ",re_" << j;
  if (ensemble.is_complex())
    for (Eigen::Index j = 0; j < ensemble.n(); ++j) os << ",im_" << j;
  os << '\n';
  for (Eigen::Index i = 0; i < ensemble.m(); ++i) {
    os << (y.codes(i) > 0 ? "1" : "-1");
    for (Eigen::Index j = 0; j < ensemble.n(); ++j) os << ',' << ensemble.real_rows()(i, j);
    if (ensemble.is_complex())
      for (Eigen::Index j = 0; j < ensemble.n(); ++j) os << ',' << ensemble.imag_rows()(i, j);
    os << '\n';
  }
  os.precision(old_precision);
}

Problem read_problem_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0)
    throw std::runtime_error("problem file: missing header line");
  std::map<std::string, std::string> header;
  {
    std::istringstream ss(line.substr(1));
    std::string token;
    while (ss >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      header[token.substr(0, eq)] = token.substr(eq + 1);
    }
  }
  for (const char* key : {"kind", "n", "m", "tau", "sigma", "seed"})
    if (!header.count(key)) throw std::runtime_error(std::string("problem file: header lacks ") + key);

  const EnsembleKind kind = ensemble_kind_from_string(header["kind"]);
  const Eigen::Index n = std::stol(header["n"]);
  const Eigen::Index m = std::stol(header["m"]);
  const bool complex_rows = kind != EnsembleKind::kGaussian;
  const std::size_t expected_cells = 1 + static_cast<std::size_t>(n) * (complex_rows ? 2 : 1);

  if (!std::getline(is, line)) throw std::runtime_error("problem file: missing column line");

  Problem p;
  p.measurements.tau = parse_double(header["tau"]);
  p.measurements.noise_sigma = parse_double(header["sigma"]);
  p.measurements.seed = std::stoull(header["seed"]);
  p.measurements.codes.resize(m);
  Eigen::MatrixXd re(m, n);
  Eigen::MatrixXd im(complex_rows ? m : 0, complex_rows ? n : 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("problem file: truncated");
    const auto cells = split_csv(line);
    if (cells.size() != expected_cells) throw std::runtime_error("problem file: wrong column count");
    const double code = parse_double(cells[0]);
    if (code != 1.0 && code != -1.0) throw std::runtime_error("problem file: code must be +1 or -1");
    p.measurements.codes(i) = code;
    for (Eigen::Index j = 0; j < n; ++j) re(i, j) = parse_double(cells[1 + j]);
    if (complex_rows)
      for (Eigen::Index j = 0; j < n; ++j) im(i, j) = parse_double(cells[1 + n + j]);
  }
  p.ensemble = SensingEnsemble(kind, std::move(re), std::move(im));
  return p;
}

void write_signal_csv(std::ostream& os, const SignalVector& x) {
  const auto old_precision = os.precision(17);
  os << "value\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << x(i) << '\n';
  os.precision(old_precision);
}

SignalVector read_signal_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("signal file: empty");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    values.push_back(parse_double(line));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace bpr
