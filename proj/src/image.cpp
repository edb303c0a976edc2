// SPDX-License-Identifier: Apache-2.0
#include "bpr/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bpr/rng.hpp"

namespace bpr {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& is) {
  std::string tok;
  char c = 0;
  while (is.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(is, rest);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

int parse_positive(const std::string& tok, const char* what) {
  try {
    const int v = std::stoi(tok);
    if (v > 0) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error(std::string("PGM: bad ") + what + ": '" + tok + "'");
}

}  // namespace

GrayImage read_pgm(std::istream& is) {
  if (next_token(is) != "P5") throw std::runtime_error("PGM: only binary P5 files are supported");
  GrayImage img;
  img.width = parse_positive(next_token(is), "width");
  img.height = parse_positive(next_token(is), "height");
  if (parse_positive(next_token(is), "maxval") != 255) throw std::runtime_error("PGM: maxval must be 255");
  // next_token consumed exactly one whitespace byte after maxval.
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  is.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (is.gcount() != static_cast<std::streamsize>(img.pixels.size())) throw std::runtime_error("PGM: truncated pixel data");
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open image " + path.string());
  return read_pgm(is);
}

void write_pgm(std::ostream& os, const GrayImage& img) {
  os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write image " + path.string());
  write_pgm(os, img);
}

PatchGrid make_patch_grid(int height, int width, std::uint64_t seed) {
  if (height <= 0 || width <= 0 || height % PatchGrid::kPatch != 0 || width % PatchGrid::kPatch != 0)
    throw std::invalid_argument("image dimensions must be positive multiples of 8");
  PatchGrid grid;
  grid.height = height;
  grid.width = width;
  grid.seeds.resize(static_cast<std::size_t>(grid.count()));
  for (std::size_t i = 0; i < grid.seeds.size(); ++i) grid.seeds[i] = derive_seed(seed, "image-patch", {i});
  return grid;
}

Eigen::VectorXd extract_patch(const GrayImage& img, int pr, int pc) {
  constexpr int p = PatchGrid::kPatch;
  Eigen::VectorXd v(p * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) v(i * p + j) = img.at(pr * p + i, pc * p + j);
  return v;
}

namespace {

using PatchMatrix = Eigen::Matrix<double, PatchGrid::kPatch, PatchGrid::kPatch, Eigen::RowMajor>;

PatchMatrix as_patch(const Eigen::VectorXd& v) { return Eigen::Map<const PatchMatrix>(v.data()); }

double negative_mass(const PatchMatrix& p) { return p.cwiseMin(0.0).squaredNorm(); }

}  // namespace

ImageReconstruction image_reconstruct(const GrayImage& truth, const ImageReconstructionConfig& config) {
  const PatchGrid grid = make_patch_grid(truth.height, truth.width, config.seed);
  constexpr int n = PatchGrid::kPatch * PatchGrid::kPatch;
  const Eigen::Index m = std::lround(config.oversampling * n);
  if (m < 1) throw std::invalid_argument("image_reconstruct: oversampling too small");
  const double tau = chi1sq_quantile(0.5);

  std::vector<PatchMatrix> recon(static_cast<std::size_t>(grid.count()));
  double srer_sum = 0.0;
  double consistency_sum = 0.0;
  int measured = 0;

  for (int pr = 0; pr < grid.patch_rows(); ++pr) {
    for (int pc = 0; pc < grid.patch_cols(); ++pc) {
      const std::size_t idx = static_cast<std::size_t>(pr * grid.patch_cols() + pc);
      const Eigen::VectorXd patch = extract_patch(truth, pr, pc);
      const double norm = patch.norm();
      if (norm == 0.0) {
        recon[idx].setZero();
        continue;
      }
      const Eigen::VectorXd unit = patch / norm;
      const SensingEnsemble ensemble = gen_gaussian_ensemble(n, m, grid.seeds[idx]);
      const BinaryMeasurements y = encode_binary(ensemble, unit, tau, 0.0, grid.seeds[idx]);
      const RunTrace run = apgd_run(ensemble, y, config.solver, unit);
      srer_sum += cap_db(run.records.back().srer_db);
      consistency_sum += run.records.back().consistency;
      ++measured;
      recon[idx] = as_patch(norm * run.estimate);
    }
  }

  // Sign resolution in raster order.
  constexpr int last = PatchGrid::kPatch - 1;
  for (int pr = 0; pr < grid.patch_rows(); ++pr) {
    for (int pc = 0; pc < grid.patch_cols(); ++pc) {
      PatchMatrix& cur = recon[static_cast<std::size_t>(pr * grid.patch_cols() + pc)];
      double keep = 0.0;
      double flip = 0.0;
      if (pc > 0) {
        const auto left = recon[static_cast<std::size_t>(pr * grid.patch_cols() + pc - 1)].col(last);
        keep += (cur.col(0) - left).squaredNorm();
        flip += (cur.col(0) + left).squaredNorm();
      }
      if (pr > 0) {
        const auto up = recon[static_cast<std::size_t>((pr - 1) * grid.patch_cols() + pc)].row(last);
        keep += (cur.row(0) - up).squaredNorm();
        flip += (cur.row(0) + up).squaredNorm();
      }
      const bool tie = std::abs(keep - flip) <= 1e-12 * (keep + flip);
      const bool negate = tie ? negative_mass(cur) > negative_mass(-cur) : flip < keep;
      if (negate) cur = -cur;
    }
  }

  ImageReconstruction out;
  out.patches = grid.count();
  out.image.width = truth.width;
  out.image.height = truth.height;
  out.image.pixels.resize(truth.pixels.size());
  for (int pr = 0; pr < grid.patch_rows(); ++pr) {
    for (int pc = 0; pc < grid.patch_cols(); ++pc) {
      const PatchMatrix& cur = recon[static_cast<std::size_t>(pr * grid.patch_cols() + pc)];
      for (int i = 0; i < PatchGrid::kPatch; ++i)
        for (int j = 0; j < PatchGrid::kPatch; ++j) {
          const double v = std::clamp(std::round(cur(i, j)), 0.0, 255.0);
          out.image.at(pr * PatchGrid::kPatch + i, pc * PatchGrid::kPatch + j) = static_cast<std::uint8_t>(v);
        }
    }
  }
  out.report.srer_db = measured > 0 ? srer_sum / measured : 0.0;
  out.report.consistency = measured > 0 ? consistency_sum / measured : 1.0;
  out.report.psnr_db = psnr(truth, out.image);
  out.report.ssim = ssim(truth, out.image);
  return out;
}

}  // namespace bpr
