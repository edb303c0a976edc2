// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "bpr/image.hpp"

using namespace bpr;

namespace {

GrayImage gradient_image(int h, int w) {
  GrayImage img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w * h))};
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) img.at(r, c) = static_cast<std::uint8_t>(40 + 6 * r + 3 * c + (r * c) % 17);
  return img;
}

}  // namespace

TEST(Pgm, RoundTrip) {
  const GrayImage img = gradient_image(5, 7);
  std::stringstream ss;
  write_pgm(ss, img);
  const GrayImage back = read_pgm(ss);
  EXPECT_EQ(back.width, 7);
  EXPECT_EQ(back.height, 5);
  EXPECT_EQ(back.pixels, img.pixels);
}

TEST(Pgm, SkipsHeaderComments) {
  std::string data = "P5\n# a comment\n2 1\n# another\n255\n";
  data.push_back(static_cast<char>(10));
  data.push_back(static_cast<char>(200));
  std::stringstream ss(data);
  const GrayImage img = read_pgm(ss);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{10, 200}));
}

TEST(Pgm, RejectsUnsupportedInput) {
  std::stringstream ascii("P2\n2 1\n255\n1 2\n");
  EXPECT_THROW(read_pgm(ascii), std::runtime_error);
  std::stringstream deep("P5\n1 1\n65535\n\x01\x02");
  EXPECT_THROW(read_pgm(deep), std::runtime_error);
  std::stringstream truncated("P5\n4 4\n255\nabc");
  EXPECT_THROW(read_pgm(truncated), std::runtime_error);
  EXPECT_THROW(read_pgm(std::filesystem::path("/nonexistent/file.pgm")), std::runtime_error);
}

TEST(PatchGrid, CountsAndSeeds) {
  const PatchGrid g = make_patch_grid(64, 64, 3);
  EXPECT_EQ(g.count(), 64);
  EXPECT_EQ(make_patch_grid(256, 256, 3).count(), 1024);
  EXPECT_EQ(make_patch_grid(16, 40, 3).count(), 10);
  EXPECT_EQ(std::set<std::uint64_t>(g.seeds.begin(), g.seeds.end()).size(), g.seeds.size());
  EXPECT_EQ(make_patch_grid(64, 64, 3).seeds, g.seeds);
}

TEST(PatchGrid, RejectsIndivisibleDimensions) {
  EXPECT_THROW(make_patch_grid(60, 64, 1), std::invalid_argument);
  EXPECT_THROW(make_patch_grid(64, 0, 1), std::invalid_argument);
}

TEST(ExtractPatch, RowMajor) {
  const GrayImage img = gradient_image(16, 16);
  const Eigen::VectorXd v = extract_patch(img, 1, 0);
  EXPECT_EQ(v(0), img.at(8, 0));
  EXPECT_EQ(v(1), img.at(8, 1));
  EXPECT_EQ(v(8), img.at(9, 0));
}

TEST(ImageReconstruct, RecoversSmoothImage) {
  const GrayImage img = gradient_image(16, 16);
  ImageReconstructionConfig cfg;
  cfg.seed = 5;
  const ImageReconstruction r = image_reconstruct(img, cfg);
  EXPECT_EQ(r.patches, 4);
  EXPECT_EQ(r.image.width, 16);
  EXPECT_EQ(r.image.height, 16);
  ASSERT_TRUE(r.report.psnr_db.has_value());
  EXPECT_GT(*r.report.psnr_db, 20.0);
  EXPECT_GT(*r.report.ssim, 0.5);
  EXPECT_GT(r.report.consistency, 0.9);
}

TEST(ImageReconstruct, Deterministic) {
  const GrayImage img = gradient_image(16, 8);
  ImageReconstructionConfig cfg;
  cfg.solver.max_iters = 20;
  EXPECT_EQ(image_reconstruct(img, cfg).image.pixels, image_reconstruct(img, cfg).image.pixels);
}

TEST(ImageReconstruct, ZeroPatchStaysZero) {
  GrayImage img = gradient_image(8, 16);
  for (int r = 0; r < 8; ++r)
    for (int c = 8; c < 16; ++c) img.at(r, c) = 0;
  ImageReconstructionConfig cfg;
  cfg.solver.max_iters = 20;
  const ImageReconstruction out = image_reconstruct(img, cfg);
  for (int r = 0; r < 8; ++r)
    for (int c = 8; c < 16; ++c) EXPECT_EQ(out.image.at(r, c), 0);
}

TEST(ImageReconstruct, RejectsIndivisibleImage) {
  EXPECT_THROW(image_reconstruct(gradient_image(12, 16), ImageReconstructionConfig{}), std::invalid_argument);
}
