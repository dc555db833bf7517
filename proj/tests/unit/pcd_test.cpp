#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ld3/errors.hpp"
#include "ld3/pcd/experiment.hpp"
#include "ld3/pcd/stats.hpp"

namespace ld3 {
namespace {

// Flat road patch on a regular grid with solid markings at y = +-1.75.
PointCloud road_grid(double step = 0.1, double half_width = 5.0, double length = 20.0) {
  PointCloud pc;
  for (double x = 0; x <= length + 1e-9; x += step) {
    for (double y = -half_width; y <= half_width + 1e-9; y += step) {
      const bool marking = std::abs(std::abs(y) - 1.75) < 0.06;
      pc.push_back({x, y, 0.0, marking ? 200.0 : 20.0 + std::fmod(x * 7 + y * 3, 3.0)});
    }
  }
  return pc;
}

void add_building(PointCloud& pc) {
  for (int i = 0; i < 200; ++i)
    pc.push_back({0.1 * i, 8.0, 0.5 + 0.02 * i, 90.0 + (i % 7)});
}

TEST(Pcd, RoundTripIsBitExact) {
  PointCloud pc = {{0.1, -2.0000000000000004, 1e-300, 255}, {1.0 / 3.0, 2.5, -7.25, 0}};
  std::stringstream buf;
  write_pcd(buf, pc);
  EXPECT_EQ(parse_pcd(buf), pc);
}

TEST(Pcd, BadLineReportsLineNumber) {
  std::istringstream in("# x y z intensity\n1 2 3 4\n1 2 three 4\n");
  try {
    parse_pcd(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream short_row("1 2 3\n");
  EXPECT_THROW(parse_pcd(short_row), ParseError);
}

TEST(Stats, PearsonExamples) {
  const std::vector<double> a{1, 2, 3, 4.5};
  EXPECT_EQ(pearson_r(a, a), 1.0);
  std::vector<double> neg;
  for (double v : a) neg.push_back(-v);
  EXPECT_DOUBLE_EQ(pearson_r(a, neg), -1.0);
  const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
  // r = 3 / sqrt(2 * (14/3)) by hand.
  EXPECT_NEAR(pearson_r(x, y), 3.0 / std::sqrt(2.0 * 14.0 / 3.0), 1e-15);
  EXPECT_NEAR(pearson_r(x, y), 0.98198, 1e-5);
}

TEST(Stats, PearsonMatchesTwoPassOracle) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a, b;
    for (int i = 0; i < 30; ++i) {
      a.push_back(n(rng) + 100);
      b.push_back(0.3 * a.back() + n(rng));
    }
    double ma = 0, mb = 0;
    for (int i = 0; i < 30; ++i) {
      ma += a[i] / 30;
      mb += b[i] / 30;
    }
    double sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < 30; ++i) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
    EXPECT_NEAR(pearson_r(a, b), sab / std::sqrt(saa * sbb), 1e-12);
  }
}

TEST(Stats, PearsonErrors) {
  const std::vector<double> c{2, 2, 2}, v{1, 2, 3}, s{1};
  EXPECT_THROW(pearson_r(c, v), ZeroVariance);
  EXPECT_THROW(pearson_r(v, c), ZeroVariance);
  EXPECT_THROW(pearson_r(v, std::vector<double>{1, 2}), LengthMismatch);
  EXPECT_THROW(pearson_r(s, s), LengthMismatch);
}

TEST(Stats, RmseExamples) {
  const std::vector<Vec2> a{{0, 0}, {1, 1}, {-2, 5}};
  EXPECT_EQ(rmse(a, a), 0.0);
  std::vector<Vec2> b;
  for (auto p : a) b.push_back(p + Vec2{0.3, 0.4});
  EXPECT_NEAR(rmse(a, b), 0.5, 1e-15);
  const std::vector<Vec2> z{{0, 0}, {0, 0}}, d{{0, 0}, {1, 0}};
  EXPECT_NEAR(rmse(z, d), std::sqrt(0.5), 1e-15);
  EXPECT_THROW(rmse(a, z), LengthMismatch);
  EXPECT_THROW(rmse(std::vector<Vec2>{}, std::vector<Vec2>{}), LengthMismatch);
}

TEST(Stats, LowerMedian) {
  EXPECT_EQ(lower_median({10, 10, 10, 200, 200}), 10.0);
  EXPECT_EQ(lower_median({4, 1, 3, 2}), 2.0);
  EXPECT_EQ(median_abs_deviation({1, 2, 3, 4, 100}), 1.0);
}

TEST(Ransac, ExactPlane) {
  PointCloud pc;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) pc.push_back({0.5 * i, 0.3 * j, 0.0, 10});
  std::mt19937_64 rng(1);
  const GroundModel g = ransac_ground(pc, 50, 0.01, rng);
  EXPECT_NEAR(std::abs(g.plane.c), 1.0, 1e-12);
  EXPECT_NEAR(g.plane.d, 0.0, 1e-12);
  EXPECT_EQ(g.inliers.size(), pc.size());
}

TEST(Ransac, RejectsOutliers) {
  PointCloud pc;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0, 30);
  for (int i = 0; i < 1000; ++i) pc.push_back({u(gen), u(gen), 0.0, 10});
  for (int i = 0; i < 50; ++i) pc.push_back({u(gen), u(gen), 5.0, 10});
  std::mt19937_64 rng(2);
  const GroundModel g = ransac_ground(pc, 100, 0.05, rng);
  ASSERT_EQ(g.inliers.size(), 1000u);
  for (std::size_t k = 0; k < 1000; ++k) EXPECT_EQ(g.inliers[k], k);
  // The true plane's inlier count beats every hypothesis touching an outlier.
  for (std::size_t o = 1000; o < 1050; ++o) {
    const auto p = plane_from_points(pc[0], pc[1], pc[o]);
    ASSERT_TRUE(p);
    EXPECT_LT(plane_inliers(pc, *p, 0.05).size(), 1000u);
  }
}

TEST(Ransac, CollinearIsDegenerate) {
  const PointCloud pc{{0, 0, 0, 1}, {1, 1, 1, 1}, {2, 2, 2, 1}};
  std::mt19937_64 rng(1);
  EXPECT_THROW(ransac_ground(pc, 20, 0.01, rng), DegenerateCloud);
  EXPECT_THROW(ransac_ground(PointCloud{{0, 0, 0, 1}}, 20, 0.01, rng), DegenerateCloud);
}

TEST(Ransac, DeterministicAndNoWorseThanSeededTruth) {
  PointCloud pc = road_grid(0.25);
  add_building(pc);
  std::mt19937_64 a(99), b(99), c(99);
  const GroundModel ga = ransac_ground(pc, 30, 0.05, a);
  const GroundModel gb = ransac_ground(pc, 30, 0.05, b);
  EXPECT_EQ(ga.inliers, gb.inliers);
  EXPECT_EQ(ga.plane.a, gb.plane.a);
  // Indices 0, 1 and 50 lie on the true road plane.
  const IndexTriple truth{0, 1, 50};
  const auto true_plane = plane_from_points(pc[0], pc[1], pc[50]);
  ASSERT_TRUE(true_plane);
  const std::size_t true_count = plane_inliers(pc, *true_plane, 0.05).size();
  const GroundModel seeded = ransac_ground(pc, 30, 0.05, c, std::span<const IndexTriple>(&truth, 1));
  EXPECT_GE(seeded.inliers.size(), true_count);
}

class MarkingTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cloud_ = road_grid();
    add_building(cloud_);
    std::mt19937_64 rng(3);
    ground_ = ransac_ground(cloud_, 100, 0.05, rng);
  }
  PointCloud cloud_;
  GroundModel ground_;
};

TEST(Marking, NoMarkingUsesMedian) {
  PointCloud pc{{0, 0, 0, 10}, {1, 0, 0, 10}, {0, 1, 0, 10}, {1, 1, 0, 200}, {2, 1, 0, 200},
                {0, 0, 3, 77}};
  GroundModel g;
  g.inliers = {0, 1, 2, 3, 4};
  const PointCloud out = make_no_marking(pc, g);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(out[i].intensity, 10.0);
  EXPECT_EQ(out[5].intensity, 77.0);
}

TEST_F(MarkingTest, NoMarkingIdempotentOnUniformGround) {
  PointCloud uniform = cloud_;
  for (std::size_t i : ground_.inliers) uniform[i].intensity = 42;
  EXPECT_EQ(make_no_marking(uniform, ground_), uniform);
}

TEST_F(MarkingTest, NoMarkingLeavesNothingAboveMedianAndKeepsPositions) {
  const PointCloud out = make_no_marking(cloud_, ground_);
  const double med = ground_median_intensity(cloud_, ground_);
  for (std::size_t i : ground_.inliers) EXPECT_LE(out[i].intensity, med);
  ASSERT_EQ(out.size(), cloud_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].x, cloud_[i].x);
    EXPECT_EQ(out[i].y, cloud_[i].y);
    EXPECT_EQ(out[i].z, cloud_[i].z);
  }
  for (std::size_t i = cloud_.size() - 200; i < cloud_.size(); ++i)
    EXPECT_EQ(out[i].intensity, cloud_[i].intensity);
  EXPECT_TRUE(marking_points(out, ground_, marking_threshold(cloud_, ground_, {})).empty());
}

TEST_F(MarkingTest, WrongMarkingShiftsStripesByHalfLane) {
  MarkingEditConfig cfg;
  const WrongMarkingResult w = make_wrong_marking(cloud_, ground_, cfg);
  EXPECT_GT(w.markings, 0u);
  EXPECT_EQ(w.moved + w.skipped, w.markings);
  // Re-detect: new stripes sit at y = 0 and y = 3.5 instead of +-1.75.
  const auto found = marking_points(w.points, ground_, w.threshold);
  ASSERT_FALSE(found.empty());
  for (std::size_t i : found) {
    const double y = w.points[i].y;
    EXPECT_TRUE(std::abs(y) < 0.16 || std::abs(y - 3.5) < 0.16) << y;
  }
  for (std::size_t i = 0; i < cloud_.size(); ++i) {
    EXPECT_EQ(w.points[i].x, cloud_[i].x);
    EXPECT_EQ(w.points[i].z, cloud_[i].z);
  }
}

TEST_F(MarkingTest, WrongMarkingRightSideAndReapplication) {
  MarkingEditConfig cfg;
  cfg.offset_side = -1;
  const WrongMarkingResult once = make_wrong_marking(cloud_, ground_, cfg);
  for (std::size_t i : marking_points(once.points, ground_, once.threshold)) {
    const double y = once.points[i].y;
    EXPECT_TRUE(std::abs(y) < 0.16 || std::abs(y + 3.5) < 0.16) << y;
  }
  // A second pass with the same threshold finds the shifted stripes and
  // moves them again.
  cfg.intensity_threshold = once.threshold;
  const WrongMarkingResult twice = make_wrong_marking(once.points, ground_, cfg);
  EXPECT_GT(twice.markings, 0u);
  for (std::size_t i : marking_points(twice.points, ground_, once.threshold)) {
    const double y = twice.points[i].y;
    // Targets near y = -5.25 exist only where the patch edge is within match_radius.
    EXPECT_TRUE(std::abs(y + 1.75) < 0.16 || std::abs(y + 5.25) < 0.3) << y;
  }
}

TEST_F(MarkingTest, ThresholdAboveAllIntensitiesIsIdentity) {
  MarkingEditConfig cfg;
  cfg.intensity_threshold = 1000.0;
  const WrongMarkingResult w = make_wrong_marking(cloud_, ground_, cfg);
  EXPECT_EQ(w.markings, 0u);
  EXPECT_EQ(w.points, cloud_);
}

TEST_F(MarkingTest, MissingTargetsAreSkippedAndCounted) {
  MarkingEditConfig cfg;
  cfg.lane_width = 12.0;  // targets at y = +-1.75 + 6 fall beyond the 5 m patch for the left stripe
  const WrongMarkingResult w = make_wrong_marking(cloud_, ground_, cfg);
  EXPECT_GT(w.skipped, 0u);
  EXPECT_EQ(w.moved + w.skipped, w.markings);
}

TEST(Experiment, GeometryLocatorIsIntensityBlind) {
  SyntheticTraceConfig sc;
  sc.count = 6;
  const LidarTrace t = generate_synthetic_trace(sc);
  const auto loc = make_geometry_locator(t.reference);
  MarkingEditConfig cfg;
  const DependencyReport r = run_dependency_experiment(t.scans, t.truth, *loc, cfg);
  EXPECT_EQ(r.r_no_marking, 1.0);
  EXPECT_EQ(r.r_wrong_marking, 1.0);
  EXPECT_EQ(r.rmse_no_marking, r.rmse_original);
  EXPECT_EQ(r.rmse_wrong_marking, r.rmse_original);
  EXPECT_EQ(r.uncertainty_no_marking, r.uncertainty_original);
  EXPECT_TRUE(r.strong_no_marking);
}

TEST(Experiment, IntensityLocatorDependsOnMarkings) {
  SyntheticTraceConfig sc;
  sc.count = 8;
  const LidarTrace t = generate_synthetic_trace(sc);
  const auto loc = make_intensity_locator(t.reference);
  const DependencyReport r = run_dependency_experiment(t.scans, t.truth, *loc, {});
  EXPECT_LT(r.r_no_marking, 1.0);
  EXPECT_LT(r.r_wrong_marking, 1.0);
  EXPECT_NE(r.rmse_no_marking, r.rmse_original);
}

TEST(Experiment, EmptyInputIsLengthMismatch) {
  const auto loc = make_geometry_locator(road_grid(0.5));
  EXPECT_THROW(run_dependency_experiment({}, {}, *loc, {}), LengthMismatch);
  SyntheticTraceConfig sc;
  sc.count = 2;
  const LidarTrace t = generate_synthetic_trace(sc);
  EXPECT_THROW(run_dependency_experiment(t.scans, std::span<const Vec2>(t.truth).first(1), *loc, {}),
               LengthMismatch);
}

TEST(Experiment, SyntheticTraceIsDeterministic) {
  SyntheticTraceConfig sc;
  sc.count = 3;
  const LidarTrace a = generate_synthetic_trace(sc);
  const LidarTrace b = generate_synthetic_trace(sc);
  EXPECT_EQ(a.reference, b.reference);
  EXPECT_EQ(a.scans, b.scans);
}

}  // namespace
}  // namespace ld3
