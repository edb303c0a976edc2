// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bpr/metrics.hpp"
#include "bpr/solver.hpp"

namespace bpr {

/// Binary (P5) 8-bit PGM. Comments in the header are skipped; maxval must be 255.
GrayImage read_pgm(std::istream& is);
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(std::ostream& os, const GrayImage& img);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Non-overlapping 8x8 tiling of an image, with one ensemble seed per patch.
struct PatchGrid {
  static constexpr int kPatch = 8;

  int height = 0;
  int width = 0;
  std::vector<std::uint64_t> seeds;  // raster order

  int patch_rows() const { return height / kPatch; }
  int patch_cols() const { return width / kPatch; }
  int count() const { return patch_rows() * patch_cols(); }
};

/// Throws std::invalid_argument unless both dimensions are positive multiples of 8.
PatchGrid make_patch_grid(int height, int width, std::uint64_t seed);

/// Row-major vectorization of patch (pr, pc).
Eigen::VectorXd extract_patch(const GrayImage& img, int pr, int pc);

struct ImageReconstructionConfig {
  double oversampling = 20.0;
  SolverConfig solver = [] {
    SolverConfig s;
    s.max_iters = 75;
    s.ls_range_max = 0.0055;
    return s;
  }();
  std::uint64_t seed = 1;
};

struct ImageReconstruction {
  GrayImage image;
  MetricReport report;  // srer_db / consistency are patch averages
  int patches = 0;
};

/// Patchwise reconstruction. Each patch is scaled to unit norm, measured with
/// its own Gaussian ensemble of round(64 * oversampling) rows, encoded at the
/// chi^2_1 median and recovered with BPR; the stored norm is reapplied. Patch
/// signs are fixed in raster order by agreement with the borders of already
/// placed neighbours, falling back to the sign with less negative mass.
ImageReconstruction image_reconstruct(const GrayImage& truth, const ImageReconstructionConfig& config);

}  // namespace bpr
