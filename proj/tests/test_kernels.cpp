#include "coxcheck/kernels.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace coxcheck::kernels;

namespace {

class Kernels : public ::testing::Test {
 protected:
  void SetUp() override { omp_set_num_threads(4); }
};

std::vector<Triple> cloud(std::size_t n, unsigned seed, int levels) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, levels);
  std::vector<Triple> out(n);
  for (auto& t : out)
    t = {static_cast<long double>(u(rng)) / levels, static_cast<long double>(u(rng)) / levels,
         static_cast<long double>(u(rng)) / levels};
  return out;
}

}  // namespace

TEST_F(Kernels, GridReductionSerialEqualsParallel) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> value(0, 5), status(0, 9);
    std::vector<PointResult<int>> points(997);
    for (auto& p : points) {
      int s = status(rng);
      p.status = s == 0 ? PointStatus::zero_denominator : s == 1 ? PointStatus::undefined : PointStatus::evaluated;
      p.residual = value(rng);
    }
    auto eval = [&](std::size_t i) { return points[i]; };
    auto a = reduce_grid_serial<int>(points.size(), eval);
    auto b = reduce_grid_parallel<int>(points.size(), eval);
    EXPECT_EQ(a.max, b.max);
    EXPECT_EQ(a.argmax, b.argmax);
    EXPECT_EQ(a.evaluated, b.evaluated);
    EXPECT_EQ(a.zero_denominator, b.zero_denominator);
    EXPECT_EQ(a.undefined, b.undefined);
  }
}

TEST_F(Kernels, EmptyReduction) {
  auto r = reduce_grid_parallel<int>(0, [](std::size_t) { return PointResult<int>{}; });
  EXPECT_FALSE(r.argmax);
  EXPECT_EQ(r.evaluated, 0u);
}

TEST_F(Kernels, NearestVariantsAgree) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    // Coarse levels force ties and exact hits.
    auto points = cloud(500, seed, 7);
    auto targets = cloud(200, seed + 100, 5);
    auto serial = nearest_serial(targets, points);
    auto parallel = nearest_parallel(targets, points);
    SortedCloud sorted(points);
    auto swept = nearest_sorted(targets, sorted, true);
    auto swept_serial = nearest_sorted(targets, sorted, false);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      EXPECT_EQ(serial[i].index, parallel[i].index);
      EXPECT_EQ(serial[i].distance, parallel[i].distance);
      EXPECT_EQ(serial[i].index, swept[i].index) << "seed " << seed << " target " << i;
      EXPECT_EQ(serial[i].distance, swept[i].distance);
      EXPECT_EQ(swept[i].index, swept_serial[i].index);
    }
  }
}

TEST_F(Kernels, NearestOnEmptyCloud) {
  std::vector<Triple> none;
  std::vector<Triple> targets{{0, 0, 0}};
  SortedCloud sorted(none);
  auto r = nearest_sorted(targets, sorted, true);
  EXPECT_EQ(r[0].index, nearest_serial(targets, none)[0].index);
  EXPECT_TRUE(std::isinf(r[0].distance));
}

TEST_F(Kernels, MapPreservesOrder) {
  auto fn = [](std::size_t i) { return i * i + 1; };
  EXPECT_EQ(map_serial<std::size_t>(100, fn), map_parallel<std::size_t>(100, fn));
}
