#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gridqr/netsim.hpp"
#include "gridqr/tree.hpp"
#include "gridqr/tsqr.hpp"

using namespace gridqr;

namespace {

Topology homogeneous(std::size_t clusters, std::size_t domains, double latency, double bandwidth,
                     double flop_rate) {
  std::vector<Cluster> cl;
  for (std::size_t c = 0; c < clusters; ++c) {
    cl.push_back({"c" + std::to_string(c), domains, latency, bandwidth, flop_rate});
  }
  DenseMatrix lat(clusters, clusters);
  DenseMatrix bw(clusters, clusters);
  for (std::size_t i = 0; i < clusters; ++i) {
    for (std::size_t j = 0; j < clusters; ++j) {
      lat(i, j) = latency;
      bw(i, j) = bandwidth;
    }
  }
  return Topology(cl, lat, bw);
}

CostReport tsqr_costs(const Topology& topo, TreeShape shape, std::size_t m, std::size_t n,
                      bool want_q = false) {
  Communicator comm(topo);
  simulate_tsqr(m, n, build_tree(topo, shape), comm, want_q);
  return comm.report();
}

}  // namespace

TEST(Communicator, FlagsInterClusterSends) {
  Communicator comm(uniform_topology(2, 2));
  comm.send(1, 0, 16);
  comm.send(2, 0, 16);
  ASSERT_EQ(comm.log().size(), 2u);
  EXPECT_FALSE(comm.log()[0].inter_cluster);
  EXPECT_TRUE(comm.log()[1].inter_cluster);
  const CostReport r = comm.report();
  EXPECT_EQ(r.inter_cluster_msg_count, 1u);
  EXPECT_EQ(r.inter_cluster_volume_bytes, 16u);
}

TEST(Communicator, PackedTriangleOfSixtyFour) {
  Communicator comm(uniform_topology(1, 2));
  comm.send(1, 0, triangle_bytes(64));
  EXPECT_EQ(comm.log()[0].bytes, 16640u);
  EXPECT_EQ(comm.report().volume_bytes, 16640u);
}

TEST(Communicator, ZeroFlopChargeIsANoOp) {
  Communicator comm(uniform_topology(1, 2));
  comm.charge_flops(0, 0.0);
  EXPECT_EQ(comm.report(), CostReport{});
  EXPECT_THROW(comm.charge_flops(0, -1.0), std::invalid_argument);
  EXPECT_THROW(comm.charge_flops(5, 1.0), std::out_of_range);
  EXPECT_THROW(comm.send(0, 0, 8), std::invalid_argument);
  EXPECT_THROW(comm.send(0, 9, 8), std::out_of_range);
}

TEST(Communicator, StepsAreStampedOnMessages) {
  Communicator comm(uniform_topology(1, 4));
  comm.set_step(3);
  comm.send(1, 0, 8, MessageKind::broadcast);
  EXPECT_EQ(comm.log()[0].step, 3u);
  EXPECT_EQ(comm.log()[0].kind, MessageKind::broadcast);
  const CostReport r = comm.report();
  EXPECT_EQ(r.broadcast_msg_count, 1u);
  EXPECT_EQ(r.critical_path_msgs, 0u);
  EXPECT_EQ(r.critical_path_all_msgs, 1u);
  EXPECT_EQ(r.critical_path_rounds, 0u);
}

TEST(Communicator, FourDomainReductionCounts) {
  const CostReport r = tsqr_costs(uniform_topology(1, 4), TreeShape::binary, 1024, 8);
  EXPECT_EQ(r.msg_count, 3u);
  EXPECT_EQ(r.critical_path_msgs, 2u);
  EXPECT_EQ(r.critical_path_rounds, 2u);
}

TEST(Communicator, LatencyOnlyTimeCountsCriticalMessages) {
  // β = 1, α = 0 (infinite bandwidth), γ = 0 (infinite flop rate).
  const Topology topo = homogeneous(1, 4, 1.0, INFINITY, INFINITY);
  const CostReport r = tsqr_costs(topo, TreeShape::binary, 1024, 8);
  EXPECT_DOUBLE_EQ(r.modeled_time_seconds, 2.0);
}

TEST(Communicator, TimeIsTheSumOfChainTermsOnAUniformNetwork) {
  const double beta = 1e-3;
  const double bw = 1e8;
  const double rate = 1e9;
  const std::size_t m = 4096;
  const std::size_t n = 16;
  const CostReport r = tsqr_costs(homogeneous(1, 8, beta, bw, rate), TreeShape::binary, m, n);
  // Every leaf has m/P rows, so all chains carry identical terms.
  const double expect = 3 * beta + 3 * double(triangle_bytes(n)) / bw +
                        (householder_flops(m / 8.0, n) + 3 * stacked_qr_flops(n)) / rate;
  EXPECT_NEAR(r.modeled_time_seconds, expect, 1e-12 * expect);
  EXPECT_EQ(r.critical_path_volume_bytes, 3 * triangle_bytes(n));
  EXPECT_NEAR(r.flops_critical_path, householder_flops(m / 8.0, n) + 3 * stacked_qr_flops(n), 1e-6);
}

TEST(Communicator, VolumeIsConservedOverTheLog) {
  for (TreeShape s : {TreeShape::flat, TreeShape::binary, TreeShape::hierarchical}) {
    Communicator comm(grid5000_topology().with_domains_per_cluster(5));
    simulate_tsqr(2000, 12, build_tree(comm.topology(), s), comm, true);
    std::uint64_t sum = 0;
    std::uint64_t inter = 0;
    for (const auto& m : comm.log()) {
      sum += m.bytes;
      inter += m.inter_cluster ? m.bytes : 0;
    }
    const CostReport r = comm.report();
    EXPECT_EQ(r.volume_bytes, sum);
    EXPECT_EQ(r.inter_cluster_volume_bytes, inter);
    EXPECT_EQ(r.msg_count, comm.log().size());
    const double ledger = [&] {
      double f = 0.0;
      for (std::size_t d = 0; d < comm.topology().domain_count(); ++d) f += comm.flops(d);
      return f;
    }();
    EXPECT_DOUBLE_EQ(r.flops_total, ledger);
  }
}

TEST(Communicator, ReplayIsDeterministic) {
  const Topology topo = grid5000_topology().with_domains_per_cluster(7);
  auto run = [&] {
    Communicator comm(topo);
    simulate_tsqr(5000, 9, build_tree(topo, TreeShape::hierarchical), comm, true);
    return std::make_pair(comm.log(), comm.report());
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Communicator, HierarchicalInterClusterCountIgnoresShape) {
  for (std::size_t c : {1u, 2u, 3u, 4u, 8u}) {
    for (std::size_t d : {1u, 4u, 6u}) {
      for (std::size_t n : {2u, 16u}) {
        const CostReport r = tsqr_costs(uniform_topology(c, d), TreeShape::hierarchical, c * d * n * 2, n);
        EXPECT_EQ(r.inter_cluster_msg_count, c - 1) << c << "x" << d << " n=" << n;
      }
    }
  }
}

TEST(Communicator, TimeIsMonotoneInEachRate) {
  const double base[3] = {1e-4, 1e8, 1e9};
  const double t0 =
      tsqr_costs(homogeneous(2, 4, base[0], base[1], base[2]), TreeShape::binary, 2048, 8)
          .modeled_time_seconds;
  for (double k : {1.5, 2.0, 10.0}) {
    const double slower_beta =
        tsqr_costs(homogeneous(2, 4, base[0] * k, base[1], base[2]), TreeShape::binary, 2048, 8)
            .modeled_time_seconds;
    const double slower_alpha =
        tsqr_costs(homogeneous(2, 4, base[0], base[1] / k, base[2]), TreeShape::binary, 2048, 8)
            .modeled_time_seconds;
    const double slower_gamma =
        tsqr_costs(homogeneous(2, 4, base[0], base[1], base[2] / k), TreeShape::binary, 2048, 8)
            .modeled_time_seconds;
    EXPECT_GT(slower_beta, t0);
    EXPECT_GT(slower_alpha, t0);
    EXPECT_GT(slower_gamma, t0);
  }
}

TEST(Communicator, RoundsCanExceedTheAsynchronousChain) {
  // Three domains: the unpaired one sends while the first pair merges.
  const CostReport r = tsqr_costs(uniform_topology(1, 3), TreeShape::binary, 300, 4);
  EXPECT_EQ(r.critical_path_rounds, 2u);
  EXPECT_EQ(r.critical_path_msgs, 1u);
}
