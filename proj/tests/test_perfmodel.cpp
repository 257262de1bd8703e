#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gridqr/baseline.hpp"
#include "gridqr/perfmodel.hpp"
#include "gridqr/tsqr.hpp"

using namespace gridqr;

namespace {

// Hand-coded rows of the cost tables, kept apart from the library code.
struct Row {
  double msgs, volume, flops;
};

Row reference_row(double m, double n, double p, double levels, Algo algo, bool want_q) {
  const double k = want_q ? 2 : 1;
  if (algo == Algo::qr2) {
    return {k * 2 * n * levels, k * levels * n * n / 2, k * (2 * m * n * n - 2.0 / 3 * n * n * n) / p};
  }
  return {k * levels, k * levels * n * n / 2,
          k * ((2 * m * n * n - 2.0 / 3 * n * n * n) / p + 2.0 / 3 * levels * n * n * n)};
}

ModelParams params(std::uint64_t m, std::uint64_t n, std::uint64_t p, Algo algo, bool want_q = false) {
  ModelParams mp;
  mp.m = m;
  mp.n = n;
  mp.p = p;
  mp.algo = algo;
  mp.want_q = want_q;
  return mp;
}

}  // namespace

TEST(Log2Ceil, Values) {
  EXPECT_EQ(log2_ceil(1), 0u);
  EXPECT_EQ(log2_ceil(2), 1u);
  EXPECT_EQ(log2_ceil(3), 2u);
  EXPECT_EQ(log2_ceil(4), 2u);
  EXPECT_EQ(log2_ceil(5), 3u);
  EXPECT_EQ(log2_ceil(256), 8u);
  EXPECT_EQ(log2_ceil(257), 9u);
}

TEST(ModelCounts, TsqrRowAtFourDomains) {
  const ModelCounts c = model_counts(params(1 << 20, 64, 4, Algo::tsqr));
  EXPECT_EQ(c.msgs, 2.0);
  EXPECT_EQ(8 * c.volume, 2.0 * (64.0 * 64 / 2) * 8);
  const double n3 = 64.0 * 64 * 64;
  EXPECT_DOUBLE_EQ(c.flops, (2.0 * (1 << 20) * 64 * 64 - 2.0 / 3 * n3) / 4 + 2.0 / 3 * 2 * n3);
}

TEST(ModelCounts, Qr2RowAtFourDomains) {
  const ModelCounts c = model_counts(params(1 << 20, 64, 4, Algo::qr2));
  EXPECT_EQ(c.msgs, 256.0);
  EXPECT_EQ(c.volume, 2.0 * 64 * 64 / 2);
}

TEST(ModelCounts, MatchesHandReferenceOnAGrid) {
  for (std::uint64_t p : {1u, 2u, 3u, 16u, 256u}) {
    for (std::uint64_t n : {1u, 64u, 500u}) {
      for (Algo a : {Algo::tsqr, Algo::qr2}) {
        for (bool q : {false, true}) {
          const std::uint64_t m = 4096 * p * n;
          const ModelCounts c = model_counts(params(m, n, p, a, q));
          const Row r = reference_row(double(m), double(n), double(p), double(log2_ceil(p)), a, q);
          EXPECT_DOUBLE_EQ(c.msgs, r.msgs);
          EXPECT_DOUBLE_EQ(c.volume, r.volume);
          EXPECT_DOUBLE_EQ(c.flops, r.flops);
        }
      }
    }
  }
}

TEST(ModelCounts, WantQDoublesEveryTerm) {
  for (std::uint64_t p : {2u, 8u, 64u}) {
    for (Algo a : {Algo::tsqr, Algo::qr2}) {
      const ModelCounts r = model_counts(params(100000, 32, p, a, false));
      const ModelCounts q = model_counts(params(100000, 32, p, a, true));
      EXPECT_EQ(q.msgs, 2 * r.msgs);
      EXPECT_EQ(q.volume, 2 * r.volume);
      EXPECT_EQ(q.flops, 2 * r.flops);
    }
  }
}

TEST(ModelCounts, RejectsEmptyDimensions) {
  EXPECT_THROW(model_counts(params(0, 1, 1, Algo::tsqr)), std::invalid_argument);
  EXPECT_THROW(model_counts(params(1, 1, 0, Algo::tsqr)), std::invalid_argument);
}

TEST(ModelTime, HandComputedUnitCase) {
  ModelParams mp = params(4, 2, 2, Algo::tsqr);
  mp.alpha = mp.beta = mp.gamma = 1.0;
  // 1 message + 8 bytes * 2 values + ((32 - 16/3) / 2 + 16/3) flops.
  EXPECT_DOUBLE_EQ(model_time(mp), 107.0 / 3.0);
}

TEST(ModelTime, LatencyOnly) {
  ModelParams mp = params(1 << 16, 16, 8, Algo::qr2);
  mp.beta = 0.5;
  EXPECT_DOUBLE_EQ(model_time(mp), 0.5 * model_counts(mp).msgs);
}

TEST(ModelTime, DoublingMOnlyMovesTheFlopTerm) {
  ModelParams mp = params(1 << 16, 16, 8, Algo::tsqr);
  mp.alpha = 1e-8;
  mp.beta = 1e-3;
  mp.gamma = 1e-9;
  ModelParams twice = mp;
  twice.m *= 2;
  const ModelCounts a = model_counts(mp);
  const ModelCounts b = model_counts(twice);
  EXPECT_EQ(a.msgs, b.msgs);
  EXPECT_EQ(a.volume, b.volume);
  EXPECT_NEAR(model_time(twice) - model_time(mp), mp.gamma * (b.flops - a.flops), 1e-15);
  EXPECT_DOUBLE_EQ(b.flops - a.flops, 2.0 * (1 << 16) * 16 * 16 / 8);
}

TEST(ModelTime, TsqrTimeFallsWithPWhileFlopsDominate) {
  double last = INFINITY;
  for (std::uint64_t p = 1; p <= 512; p *= 2) {
    ModelParams mp = params(1 << 25, 64, p, Algo::tsqr);
    mp.alpha = 1e-9;
    mp.beta = 1e-4;
    mp.gamma = 1e-9;
    const double t = model_time(mp);
    EXPECT_LT(t, last) << "p=" << p;
    last = t;
  }
}

TEST(LevelProfile, HomogeneousMatchesScalarModel) {
  const Topology topo = uniform_topology(2, 8);
  const LevelProfile prof = level_profile(topo, build_tree(topo, TreeShape::hierarchical));
  ASSERT_EQ(prof.levels.size(), 4u);
  for (bool q : {false, true}) {
    for (Algo a : {Algo::tsqr, Algo::qr2}) {
      ModelParams mp = params(1 << 20, 40, 16, a, q);
      mp.alpha = prof.levels[0].alpha;
      mp.beta = prof.levels[0].beta;
      mp.gamma = prof.gamma;
      EXPECT_NEAR(model_time(mp, prof), model_time(mp), 1e-12 * model_time(mp));
    }
  }
}

TEST(LevelProfile, GridUsesSlowLinksOnTheTopLevels) {
  const Topology g = grid5000_topology();
  const LevelProfile prof = level_profile(g, build_tree(g, TreeShape::hierarchical));
  ASSERT_EQ(prof.levels.size(), 8u);
  for (std::size_t l = 0; l < 6; ++l) EXPECT_DOUBLE_EQ(prof.levels[l].beta, 0.07e-3);
  EXPECT_GT(prof.levels[6].beta, 5e-3);
  EXPECT_GT(prof.levels[7].beta, 5e-3);
  EXPECT_DOUBLE_EQ(prof.gamma, 1.0 / 3.671875e9);
}

TEST(ModelVsSimulator, HomogeneousCountsAgree) {
  const Topology topo = uniform_topology(1, 16);
  for (std::uint64_t n : {4u, 32u}) {
    for (bool q : {false, true}) {
      const std::uint64_t m = 1 << 16;
      Communicator comm(topo);
      simulate_tsqr(m, n, build_tree(topo, TreeShape::binary), comm, q);
      const CostReport r = comm.report();
      const ModelCounts c = model_counts(params(m, n, 16, Algo::tsqr, q));
      EXPECT_EQ(double(r.critical_path_rounds), c.msgs);
      EXPECT_EQ(double(r.critical_path_msgs), c.msgs);
      // The tables count n²/2 values per triangle; the packed payload adds the diagonal.
      EXPECT_EQ(double(r.critical_path_volume_bytes), 8 * (c.volume + c.msgs * double(n) / 2));
      EXPECT_NEAR(r.flops_critical_path, c.flops, 0.01 * c.flops);
    }
  }
}

TEST(ModelVsSimulator, Qr2MessagesDifferByOneSweep) {
  const Topology topo = uniform_topology(1, 8);
  const std::uint64_t n = 20;
  Communicator comm(topo);
  simulate_qr2(8000, n, build_tree(topo, TreeShape::binary), comm);
  const ModelCounts c = model_counts(params(8000, n, 8, Algo::qr2));
  EXPECT_EQ(double(comm.report().critical_path_rounds), c.msgs - 3);
  EXPECT_NEAR(comm.report().flops_critical_path, c.flops, 0.01 * c.flops);
}

TEST(Crossover, LatencyBoundNeverCrosses) {
  EXPECT_EQ(crossover_n(1 << 20, 64, 0.0, 1e6, 1e-12, 4096), std::nullopt);
}

TEST(Crossover, FlopBoundCrossesImmediately) {
  EXPECT_EQ(crossover_n(1 << 20, 64, 0.0, 0.0, 1.0), std::optional<std::uint64_t>{1});
}

TEST(Crossover, BisectionFindsTheFirstSignChange) {
  const double alpha = 1e-8;
  const double beta = 1e-3;
  const double gamma = 1e-9;
  const auto n = crossover_n(1 << 22, 64, alpha, beta, gamma);
  ASSERT_TRUE(n.has_value());
  auto gap = [&](std::uint64_t k) {
    ModelParams mp{1 << 22, k, 64, alpha, beta, gamma, false, Algo::qr2};
    const double q = model_time(mp);
    mp.algo = Algo::tsqr;
    return q - model_time(mp);
  };
  EXPECT_LT(gap(*n), 0.0);
  for (std::uint64_t k = 1; k < *n; ++k) ASSERT_GE(gap(k), 0.0) << k;
}

TEST(Crossover, GridPresetRegression) {
  const Topology g = grid5000_topology();
  const LevelProfile t = level_profile(g, build_tree(g, TreeShape::hierarchical));
  const LevelProfile q = level_profile(g, build_tree(g, TreeShape::binary));
  EXPECT_EQ(crossover_n(8388608, 256, t, q), std::optional<std::uint64_t>{4601});
  for (std::uint64_t n = 8; n <= 256; ++n) {
    EXPECT_LT(model_time_on(g, Algo::tsqr, 8388608, n), model_time_on(g, Algo::qr2, 8388608, n)) << n;
  }
}

TEST(SpeedupCurve, ZeroCommunicationScalesLinearly) {
  std::vector<Cluster> cl;
  for (int i = 0; i < 4; ++i) cl.push_back({"s" + std::to_string(i), 16, 0.0, INFINITY, 1e9});
  DenseMatrix lat(4, 4);
  DenseMatrix bw(4, 4);
  for (std::size_t i = 0; i < 16; ++i) bw.data()[i] = INFINITY;
  const Topology topo(cl, lat, bw);
  const std::uint64_t ms[] = {1 << 20};
  const std::uint64_t ns[] = {32};
  const std::size_t sites[] = {1, 2, 4};
  for (const auto& pt : speedup_curve(topo, Algo::qr2, ms, ns, sites)) {
    EXPECT_DOUBLE_EQ(pt.speedup, double(pt.sites));
  }
  for (const auto& pt : speedup_curve(topo, Algo::tsqr, ms, ns, sites)) {
    EXPECT_NEAR(pt.speedup, double(pt.sites), 0.01 * double(pt.sites));
  }
}

TEST(SpeedupCurve, GridContrast) {
  const Topology g = grid5000_topology();
  const std::size_t sites[] = {1, 2, 4};
  const std::uint64_t big[] = {33554432};
  const std::uint64_t small[] = {131072};
  const std::uint64_t n64[] = {64};
  const auto tsqr = speedup_curve(g, Algo::tsqr, big, n64, sites, 64);
  ASSERT_EQ(tsqr.size(), 3u);
  EXPECT_DOUBLE_EQ(tsqr[0].speedup, 1.0);
  EXPECT_GE(tsqr[2].speedup, 3.5);
  EXPECT_LE(tsqr[2].speedup, 4.0);
  EXPECT_GT(tsqr[1].speedup, 1.0);
  const auto qr2 = speedup_curve(g, Algo::qr2, small, n64, sites, 64);
  EXPECT_LT(qr2[1].speedup, 1.0);
  EXPECT_LT(qr2[2].speedup, 1.0);
}

TEST(ParseAlgo, Names) {
  EXPECT_EQ(parse_algo("tsqr"), Algo::tsqr);
  EXPECT_EQ(parse_algo("qr2"), Algo::qr2);
  EXPECT_EQ(to_string(Algo::qr2), "qr2");
  EXPECT_THROW(parse_algo("caqr"), std::invalid_argument);
}
